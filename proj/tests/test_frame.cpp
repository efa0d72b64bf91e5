#include <doctest.h>

#include "ownlin/frame.hpp"
#include "ownlin/program_file.hpp"
#include "ownlin/semantics.hpp"

using namespace ownlin;

namespace {

std::string corpus(const std::string& f) { return std::string(OWNLIN_CORPUS_DIR) + "/" + f; }

InterfaceAction ia(ThreadId t, CallKind k, const std::string& m, State s) { return {t, k, m, std::move(s)}; }

struct Stack {
  Program lock = load_program(corpus("lock_stack.json"));
  Program atomic = load_program(corpus("atomic_stack.json"));
  SpecExtensionFile ext = load_spec_extension(corpus("stack_ext.json"), AlgebraId::ram, 2);
};

struct Allocator {
  Program prog = load_program(corpus("allocator.json"));
  SpecExtensionFile ext = load_spec_extension(corpus("allocator_ext.json"), AlgebraId::ram, 2);
};

FrameInputs inputs(const Program& a, const Program& b, const SpecExtensionFile& x, std::size_t max_trace) {
  FrameInputs in{&a.library, &b.library, &x.base, &x.extended, a.init, b.init, x.extra_init, a.bounds, a.algebra};
  in.bounds.max_trace = max_trace;
  return in;
}

}  // namespace

TEST_CASE("extension relation") {
  Stack s;
  CHECK(extends(s.ext.base, s.ext.base));
  CHECK(extends(s.ext.extended, s.ext.base));
  CHECK_FALSE(extends(s.ext.base, s.ext.extended));
  CHECK(s.ext.extended == s.lock.gamma);
  Allocator a;
  CHECK(extends(a.ext.extended, a.ext.base));
  CHECK_FALSE(extends(a.ext.base, a.ext.extended));
  CHECK_THROWS_AS(SpecExtension(s.ext.extended, s.ext.base), std::invalid_argument);
  CHECK_NOTHROW(SpecExtension(s.ext.base, s.ext.extended));
  Spec fewer = s.ext.extended;
  fewer.erase("pop");
  CHECK_FALSE(extends(fewer, s.ext.base));
}

TEST_CASE("floor and ceil") {
  Stack s;
  const Spec& base = s.ext.base;
  auto psi = ia(1, CallKind::call, "push", State::ram({{1, 10}, {10, 0}}));
  CHECK(floor_action(psi, base).state == State::ram({{1, 10}}));
  CHECK(ceil_action(psi, base).state == State::ram({{10, 0}}));
  CHECK(floor_action(psi, base).method == "push");
  CHECK(ceil_action(psi, base).thread == 1);

  auto bad = ia(2, CallKind::call, "push", State::ram({{10, 0}}));
  CHECK_THROWS_AS(floor_action(bad, base), FrameViolation);
  try {
    ceil_action(bad, base);
  } catch (const FrameViolation& v) {
    CHECK(v.action == bad);
  }

  // recomposition, and the unit extra piece when nothing is extended
  TraceMachine m(&s.lock.library, nullptr, GenMode::library_local, Bounds{2, 2, 2, 8});
  std::size_t n = 0;
  for (const auto& s0 : s.lock.init) {
    explore_outcomes(m, &s.ext.extended, s0, [&](const Trace& tr, const std::vector<Outcome>& outs) {
      for (const auto& o : outs) {
        History h = history(annotate(tr, o.annots), AlgebraId::ram);
        History f = floor_history(h, base);
        History c = ceil_history(h, base);
        for (std::size_t i = 0; i < h.size(); ++i) {
          ++n;
          auto back = star(f[i].state, c[i].state);
          REQUIRE(back);
          CHECK(*back == h[i].state);
        }
        for (const auto& a : ceil_history(h, s.ext.extended)) CHECK(a.state.empty());
        CHECK(floor_history(h, s.ext.extended) == h);
      }
    });
  }
  CHECK(n > 100);
}

TEST_CASE("extra state evaluation") {
  State s = State::ram({{20, 1}});
  CHECK(*extra_eval({}, s).state == s);

  History give_back{ia(1, CallKind::call, "m", State::ram({{10, 0}})), ia(1, CallKind::ret, "m", State::ram({{10, 0}}))};
  auto e = extra_eval(give_back, s);
  REQUIRE_FALSE(e.top());
  CHECK(*e.state == s);

  History changed{ia(1, CallKind::call, "m", State::ram({{10, 0}})), ia(1, CallKind::ret, "m", State::ram({{10, 5}}))};
  e = extra_eval(changed, s);
  CHECK(e.top());
  CHECK(e.failed_at == 1);

  History withheld{ia(1, CallKind::ret, "m", State::ram({{11, 0}}))};
  CHECK(extra_eval(withheld, s).top());
  CHECK(extra_eval(withheld, State::ram({{11, 0}})).state == State{});

  History clash{ia(1, CallKind::call, "m", State::ram({{20, 0}}))};
  CHECK(extra_eval(clash, s).top());
  CHECK(extra_eval(clash, s).failed_at == 0);
}

TEST_CASE("frame check on the stack") {
  Stack s;
  FrameReport r = frame_check(inputs(s.lock, s.lock, s.ext, 8));
  CHECK(r.verdict == Verdict::holds_at_bounds);
  CHECK(r.hypotheses_ok());
  CHECK(r.agrees());
  CHECK(r.lemmas.passed());
  CHECK(r.lemmas.cases == r.traces);
  CHECK(r.reconstructed > 0);
  CHECK(r.unreached == 0);
  CHECK_FALSE(r.witness);

  // footprints differ (the lock cell), so the base relation fails
  FrameReport rev = frame_check(inputs(s.atomic, s.lock, s.ext, 8));
  CHECK(rev.verdict == Verdict::hypothesis_failed);
  CHECK_FALSE(rev.base_lin.ok);
  CHECK(rev.untouched.ok);
  REQUIRE(rev.direct);
  CHECK(rev.direct->verdict == Verdict::violated);
}

TEST_CASE("extended equal to base reduces to the plain check") {
  Stack s;
  SpecExtensionFile same{s.lock.gamma, s.lock.gamma, {State{}}};
  FrameReport r = frame_check(inputs(s.lock, s.atomic, same, 8));
  LinCheck plain = check_lin_code(s.lock.library, s.lock.gamma, s.lock.init, s.atomic.library, s.atomic.init,
                                  Bounds{2, 2, 2, 8}, AlgebraId::ram);
  REQUIRE(r.base_check);
  CHECK(r.base_check->verdict == plain.verdict);
  REQUIRE(r.direct);
  CHECK(r.direct->verdict == plain.verdict);
  CHECK(r.verdict == plain.verdict);
}

TEST_CASE("allocator writing into blocks") {
  Allocator a;
  FrameReport r = frame_check(inputs(a.prog, a.prog, a.ext, 6));
  CHECK(r.verdict == Verdict::hypothesis_failed);
  CHECK(r.extends.ok);
  CHECK_FALSE(r.safety.ok);
  CHECK_FALSE(r.untouched.ok);
  REQUIRE(r.witness);
  CHECK(r.witness->ceiled[r.witness->index].is_ret());
  CHECK(extra_eval(r.witness->ceiled, r.witness->extra).top());
  CHECK(r.untouched.detail.find("undefined") != std::string::npos);
  // safe under the extended spec, and linearizable against itself there
  REQUIRE(r.direct);
  CHECK(r.direct->verdict == Verdict::holds_at_bounds);
}

TEST_CASE("non-extension is reported as hypothesis one") {
  Stack s;
  SpecExtensionFile swapped{s.ext.extended, s.ext.base, {State{}}};
  FrameReport r = frame_check(inputs(s.lock, s.lock, swapped, 6));
  CHECK(r.verdict == Verdict::hypothesis_failed);
  CHECK_FALSE(r.extends.ok);
  CHECK(r.detail.find("(1)") != std::string::npos);
}
