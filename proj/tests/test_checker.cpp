#include <doctest.h>

#include <random>

#include "ownlin/checker.hpp"
#include "ownlin/fixtures.hpp"
#include "ownlin/program_file.hpp"
#include "ownlin/semantics.hpp"

using namespace ownlin;

namespace {

std::string corpus(const std::string& f) { return std::string(OWNLIN_CORPUS_DIR) + "/" + f; }

Bounds small() { return Bounds{2, 2, 2, 8}; }
// long enough for the atomic stack's client to pop what it pushed
Bounds mid() { return Bounds{2, 2, 2, 10}; }

struct Corpus {
  Program lock = load_program(corpus("lock_stack.json"));
  Program atomic = load_program(corpus("atomic_stack.json"));
  Program queue = load_program(corpus("atomic_queue.json"));
};

LinCheck lin(const Program& a, const Program& b, const Bounds& bounds) {
  return check_lin_code(a.library, a.gamma, a.init, b.library, b.init, bounds, a.algebra);
}

}  // namespace

TEST_CASE("verdict wording and exit codes") {
  CHECK(to_string(Verdict::holds_at_bounds) == "HOLDS-AT-BOUNDS");
  CHECK(to_string(Verdict::violated) == "VIOLATED");
  CHECK(to_string(Verdict::hypothesis_failed) == "HYPOTHESIS-FAILED");
  CHECK(exit_code(Verdict::holds_at_bounds) == 0);
  CHECK(exit_code(Verdict::violated) == 1);
  CHECK(exit_code(Verdict::hypothesis_failed) == 2);
}

TEST_CASE("corpus libraries") {
  Corpus c;
  for (const Program* p : {&c.lock, &c.atomic}) {
    LinCheck self = lin(*p, *p, small());
    CHECK(self.verdict == Verdict::holds_at_bounds);
    CHECK(self.left_size == self.right_size);
    CHECK(self.inclusion == true);
  }
  LinCheck la = lin(c.lock, c.atomic, small());
  CHECK(la.verdict == Verdict::holds_at_bounds);
  CHECK(la.inclusion == true);
  CHECK(la.left_size < la.right_size);

  // LIFO against FIFO
  LinCheck sq = lin(c.atomic, c.queue, small());
  CHECK(sq.verdict == Verdict::violated);
  CHECK(sq.inclusion == false);
  REQUIRE(sq.leq.failing);
  CHECK(sq.detail.find("not linearized") != std::string::npos);

  // the lock cell is not in the atomic stack's footprint
  LinCheck al = lin(c.atomic, c.lock, small());
  CHECK(al.verdict == Verdict::violated);
  CHECK(al.inclusion == false);
}

TEST_CASE("witness table") {
  Corpus c;
  LinCheck r = check_lin_code(c.lock.library, c.lock.gamma, c.lock.init, c.atomic.library, c.atomic.init,
                              Bounds{2, 2, 2, 6}, AlgebraId::ram, true);
  REQUIRE(r.verdict == Verdict::holds_at_bounds);
  CHECK(r.leq.entries.size() == r.left_size);
  for (const auto& e : r.leq.entries) {
    REQUIRE(e.matched);
    CHECK(is_lin_witness(e.entry.history, e.matched->history, e.witness));
    CHECK(foot_leq(e.matched->initial, e.entry.initial));
  }
}

TEST_CASE("unsafe library is a failed hypothesis") {
  Corpus c;
  const Spec& loose = c.atomic.gamma;
  LinCheck r;
  Library stray = c.atomic.library;
  stray.methods["pop"] = Command::of(PrimCommand::store(Expr::lit(30), Expr::lit(1)));
  r = check_lin_code(stray, loose, c.atomic.init, c.atomic.library, c.atomic.init, small(), AlgebraId::ram);
  CHECK(r.verdict == Verdict::hypothesis_failed);
  CHECK(r.detail.find("unsafe") != std::string::npos);
  r = check_lin_code(c.atomic.library, loose, c.atomic.init, stray, c.atomic.init, small(), AlgebraId::ram);
  CHECK(r.verdict == Verdict::hypothesis_failed);
  CHECK(r.detail.find("second") != std::string::npos);
}

TEST_CASE("interface-set variants") {
  Corpus c;
  InterfaceSet h2 = interf(c.atomic.library, c.atomic.gamma, c.atomic.init, small(), AlgebraId::ram);
  LinCheck full = check_lin_interfaceset(c.lock.library, c.lock.gamma, c.lock.init, h2, small(), AlgebraId::ram);
  CHECK(full.verdict == Verdict::holds_at_bounds);
  CHECK(full.inclusion == true);

  // the sequential histories alone still linearize everything, but exact
  // inclusion no longer holds
  InterfaceSet seq = sequential_part(h2);
  CHECK(seq.size() < h2.size());
  for (const auto& e : seq) CHECK(h2.count(e));
  LinCheck s = check_lin_interfaceset(c.lock.library, c.lock.gamma, c.lock.init, seq, small(), AlgebraId::ram);
  CHECK(s.verdict == Verdict::holds_at_bounds);
  CHECK(s.inclusion == false);

  // without histories where pop returns a pushed object, not linearized
  InterfaceSet pruned;
  for (const auto& e : h2) {
    bool popped_object = false;
    for (const auto& a : e.history) popped_object = popped_object || (a.method == "pop" && a.is_ret() && a.state.size() > 1);
    if (!popped_object) pruned.insert(e);
  }
  CHECK(pruned.size() < h2.size());
  LinCheck p = check_lin_interfaceset(c.atomic.library, c.atomic.gamma, c.atomic.init, pruned, small(), AlgebraId::ram);
  CHECK(p.verdict == Verdict::violated);
  CHECK(p.inclusion == false);
}

TEST_CASE("sequential part") {
  using IA = InterfaceAction;
  auto act = [](ThreadId t, CallKind k) { return IA{t, k, "m", State{}}; };
  History seq{act(1, CallKind::call), act(1, CallKind::ret), act(2, CallKind::call)};
  History pend{act(1, CallKind::call), act(2, CallKind::call)};
  History overlap{act(1, CallKind::call), act(2, CallKind::call), act(1, CallKind::ret)};
  InterfaceSet is{{Footprint{}, seq}, {Footprint{}, pend}, {Footprint{}, overlap}, {Footprint{}, {}}};
  InterfaceSet out = sequential_part(is);
  CHECK(out.size() == 3);
  CHECK_FALSE(out.count({Footprint{}, overlap}));
}

TEST_CASE("agreement of the two linearizability checks") {
  std::mt19937_64 rng(7);
  const Bounds b = fixtures::small_bounds();
  const Spec g = fixtures::buffer_spec();
  const std::vector<State> init{fixtures::buffer_init()};
  int holds = 0;
  int fails = 0;
  for (int i = 0; i < 8; ++i) {
    Library l1 = fixtures::random_buffer_library(rng);
    Library l2 = (i % 2 == 0) ? fixtures::atomized(l1, b.star) : fixtures::random_buffer_library(rng);
    for (auto [x, y] : {std::pair{&l1, &l2}, std::pair{&l2, &l1}}) {
      LinCheck r = check_lin_code(*x, g, init, *y, init, b, AlgebraId::ram);
      REQUIRE(r.verdict != Verdict::hypothesis_failed);
      REQUIRE(r.inclusion);
      CHECK(*r.inclusion == r.leq.holds);
      (r.leq.holds ? holds : fails)++;
    }
  }
  CHECK(holds > 0);
  CHECK(fails > 0);
}

TEST_CASE("abstraction with code") {
  Corpus c;
  AbstractionInputs in{&c.lock.client, &c.lock.gamma, c.lock.client_init, &c.lock.library, c.lock.init,
                       AlgebraId::ram, small()};
  AbstractionCheck r = abstraction_check_code(in, c.atomic.library, c.atomic.init);
  CHECK(r.verdict == Verdict::holds_at_bounds);
  in.l1 = &c.atomic.library;
  in.i1 = c.atomic.init;
  in.bounds = mid();
  r = abstraction_check_code(in, c.atomic.library, c.atomic.init);
  CHECK(r.verdict == Verdict::holds_at_bounds);
  REQUIRE(r.lin);
  CHECK(r.lin->verdict == Verdict::holds_at_bounds);
  CHECK(r.concrete_outcomes > 0);
  CHECK_FALSE(r.counterexample);

  // the queue is not a linearization: the hypothesis fails
  r = abstraction_check_code(in, c.queue.library, c.queue.init);
  CHECK(r.verdict == Verdict::hypothesis_failed);

  // with the hypothesis waived, some client behaviour is lost
  Library never_full = c.atomic.library;
  never_full.methods["pop"] =
      Command::of(PrimCommand::store(Expr::tid(), Expr::lit(0)));  // always reports empty
  AbstractionInputs in2 = in;
  r = abstraction_check_code(in2, never_full, c.atomic.init, true);
  CHECK_FALSE(r.lin);
  CHECK(r.verdict == Verdict::violated);
  REQUIRE(r.counterexample);
}

TEST_CASE("abstraction with an interface set") {
  Corpus c;
  AbstractionInputs in{&c.lock.client, &c.lock.gamma, c.lock.client_init, &c.atomic.library, c.atomic.init,
                       AlgebraId::ram, mid()};
  InterfaceSet h2 = interf(c.atomic.library, c.atomic.gamma, c.atomic.init, mid(), AlgebraId::ram);
  AbstractionCheck r = abstraction_check_spec(in, h2);
  CHECK(r.verdict == Verdict::holds_at_bounds);
  CHECK(r.abstract_outcomes > 0);

  InterfaceSet only_empty;
  for (const auto& e : h2) {
    bool ok = true;
    for (const auto& a : e.history) ok = ok && !(a.method == "pop" && a.is_ret() && a.state.size() > 1);
    if (ok) only_empty.insert(e);
  }
  r = abstraction_check_spec(in, only_empty, true);
  CHECK(r.verdict == Verdict::violated);
  REQUIRE(r.counterexample);
  r = abstraction_check_spec(in, only_empty);
  CHECK(r.verdict == Verdict::hypothesis_failed);
}

TEST_CASE("sequential histories suffice for the lock-based stack") {
  Corpus c;
  AbstractionInputs in{&c.lock.client, &c.lock.gamma, c.lock.client_init, &c.lock.library, c.lock.init,
                       AlgebraId::ram, c.lock.bounds};
  InterfaceSet seq = sequential_part(interf(c.atomic.library, c.atomic.gamma, c.atomic.init, c.lock.bounds, AlgebraId::ram));
  AbstractionCheck r = abstraction_check_spec(in, seq);
  CHECK_MESSAGE(r.verdict == Verdict::holds_at_bounds, r.detail);
  REQUIRE(r.lin);
  CHECK(r.lin->inclusion == false);
}
