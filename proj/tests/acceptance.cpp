// One PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "instances.hpp"
#include "ownlin/checker.hpp"
#include "ownlin/fixtures.hpp"
#include "ownlin/footprint.hpp"
#include "ownlin/frame.hpp"
#include "ownlin/program_file.hpp"
#include "ownlin/semantics.hpp"
#include "support.hpp"

using namespace ownlin;
using namespace ownlin::testing;

namespace {

std::string corpus(const std::string& f) { return std::string(OWNLIN_CORPUS_DIR) + "/" + f; }

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Result algebra_laws() {
  std::ostringstream d;
  bool ok = true;
  for (AlgebraId alg : {AlgebraId::ram, AlgebraId::ram_pi}) {
    auto t0 = std::chrono::steady_clock::now();
    LawReport r = algebra_law_check(alg, StateUniverse{});
    double s = seconds_since(t0);
    ok = ok && r.passed() && r.cases > 0 && s < 10.0;
    d << to_string(alg) << ": " << r.cases << " cases, " << r.violations << " counterexamples, " << s << " s; ";
  }
  return {ok, d.str()};
}

Result footprint_laws() {
  std::ostringstream d;
  bool ok = true;
  for (AlgebraId alg : {AlgebraId::ram, AlgebraId::ram_pi}) {
    LawReport r = footprint_law_check(alg, StateUniverse{});
    ok = ok && r.passed() && r.cases > 0;
    d << to_string(alg) << ": " << r.cases << " cases, " << r.violations << " counterexamples";
    if (!r.passed()) d << " (first: " << r.counterexamples.front().law << " at " << r.counterexamples.front().inputs << ")";
    d << "; ";
  }
  return {ok, d.str()};
}

Result balancedness() {
  State c10 = State::ram({{10, 0}});
  Footprint empty = delta(State(AlgebraId::ram));
  History twice{call(1, "m", c10), call(2, "mm", c10)};
  History back{call(1, "m", c10), ret(1, "m", c10), call(2, "mm", c10)};
  bool rejected = !is_balanced(twice, empty);
  auto end = evaluate_footprint(back, empty);
  bool accepted = end && *end == delta(c10);
  return {rejected && accepted, std::string("double transfer ") + (rejected ? "rejected" : "ACCEPTED") +
                                    ", transfer-return-transfer " + (accepted ? "accepted with {10}" : "REJECTED")};
}

Result lin_vs_brute() {
  std::size_t pairs = 0;
  std::size_t agree = 0;
  std::size_t positive = 0;
  auto one = [&](const History& h, const History& h2) {
    ++pairs;
    bool brute = linearized_by_bruteforce(h, h2);
    auto w = linearized_by(h, h2);
    bool same = brute == w.has_value() && (!w || is_lin_witness(h, h2, *w));
    agree += same;
    positive += brute;
  };
  for (const auto& h : all_histories(7, 2, {"a", "b"})) {
    for (const auto& h2 : reorderings(h)) one(h, h2);
  }
  std::size_t exhaustive = pairs;
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    History h = random_history(10, 2, {"a", "b"}, rng);
    one(h, random_reordering(h, rng));
  }
  return {agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) + " agree (" +
                              std::to_string(exhaustive) + " exhaustive pairs up to length 7, 1000 random of length 10; " +
                              std::to_string(positive) + " linearized)"};
}

Result validators() {
  std::vector<PrimCommand> builtins{
      PrimCommand::skip(),
      PrimCommand::store(Expr::lit(1), Expr::lit(0)),
      PrimCommand::store(Expr::lit(1), Expr::deref(Expr::lit(2))),
      PrimCommand::store(Expr::tid(), Expr::add(Expr::deref(Expr::lit(1)), Expr::lit(1))),
      PrimCommand::assume(Expr::deref(Expr::lit(1))),
      PrimCommand::assume(Expr::not_(Expr::deref(Expr::tid()))),
  };
  bool ok = true;
  std::size_t cases = 0;
  for (const auto& c : builtins) {
    Transformer f = [&](ThreadId t, const State& s) { return prim_step(c, t, s); };
    for (AlgebraId alg : {AlgebraId::ram, AlgebraId::ram_pi}) {
      LawReport r = validate_transformer(f, alg, StateUniverse{});
      ok = ok && r.passed();
      cases += r.cases;
    }
  }
  std::string d = "builtins " + std::string(ok ? "pass" : "FAIL") + " over " + std::to_string(cases) + " cases";
  auto r1 = validate_transformer(probe_writer, AlgebraId::ram, StateUniverse{});
  auto r2 = validate_transformer(peeking_writer, AlgebraId::ram, StateUniverse{});
  const auto* loc = r1.first("locality");
  const auto* strong = r2.first("strong-locality");
  bool w1 = loc && loc->inputs == "t=1, s1=[], s2=[1:1]";
  bool w2 = strong && strong->inputs == "t=1, s1=[1:0], s2=[2:0]";
  d += "; locality witness " + (loc ? loc->inputs : std::string("none"));
  d += "; strong-locality witness " + (strong ? strong->inputs : std::string("none"));
  return {ok && w1 && w2, d};
}

Result local_global() {
  std::ostringstream d;
  bool ok = true;
  for (const char* name : {"lock_stack.json", "atomic_stack.json"}) {
    Program p = load_program(corpus(name));
    auto rep = compose_decompose_check(p.client, p.library, p.gamma, p.client_init, p.init, p.bounds);
    EvalOptions keep;
    keep.keep_returned = true;
    auto bad = compose_decompose_check(p.client, p.library, p.gamma, p.client_init, p.init, p.bounds, keep);
    bool good = rep.equal() && !bad.equal();
    ok = ok && good;
    d << p.name << " (K=" << p.bounds.star << ", N=" << p.bounds.mgc_threads << ", L=" << p.bounds.max_trace
      << "): " << rep.left_size << " = " << rep.right_size << (rep.equal() ? " equal" : " DIFFER")
      << ", mutant " << (bad.equal() ? "MISSED" : "detected") << "; ";
  }
  return {ok, d.str()};
}

Result rearrangement() {
  std::mt19937_64 rng(99);
  int done = 0;
  int ok = 0;
  int assertions = 0;
  int moved = 0;
  std::string first_failure;
  while (done < 200) {
    LibraryRuns runs = library_runs(rng);
    for (int i = 0; i < 4 && done < 200; ++i) {
      auto in = random_instance(runs, rng);
      if (!in) break;
      auto out = run_instance(runs, *in);
      ++done;
      ok += out.rearranged;
      assertions += out.assertion;
      moved += in->target != history(in->lambda2, AlgebraId::ram);
      if (!out.rearranged && first_failure.empty()) first_failure = out.detail;
    }
  }
  std::string d = std::to_string(ok) + "/" + std::to_string(done) + " rearranged (" + std::to_string(moved) +
                  " needed reordering), " + std::to_string(assertions) + " assertions";
  if (!first_failure.empty()) d += "; first failure: " + first_failure;
  return {ok == done && assertions == 0, d};
}

Result two_verdicts() {
  std::mt19937_64 rng(65);
  const Bounds b = fixtures::small_bounds();
  const Spec g = fixtures::buffer_spec();
  const std::vector<State> init{fixtures::buffer_init()};
  int checks = 0;
  int agree = 0;
  int holds = 0;
  for (int i = 0; i < 50; ++i) {
    Library l1 = fixtures::random_buffer_library(rng);
    Library l2 = (i % 2 == 0) ? fixtures::atomized(l1, b.star) : fixtures::random_buffer_library(rng);
    for (auto [x, y] : {std::pair{&l1, &l2}, std::pair{&l2, &l1}}) {
      LinCheck r = check_lin_code(*x, g, init, *y, init, b, AlgebraId::ram);
      ++checks;
      agree += r.verdict != Verdict::hypothesis_failed && r.inclusion && *r.inclusion == r.leq.holds;
      holds += r.leq.holds;
    }
  }
  Program lock = load_program(corpus("lock_stack.json"));
  Program atomic = load_program(corpus("atomic_stack.json"));
  Program queue = load_program(corpus("atomic_queue.json"));
  int corpus_checks = 0;
  const std::pair<const Program*, const Program*> pairs[] = {
      {&lock, &atomic}, {&atomic, &lock}, {&atomic, &queue}, {&queue, &atomic}, {&lock, &lock}};
  for (auto [x, y] : pairs) {
    LinCheck r = check_lin_code(x->library, x->gamma, x->init, y->library, y->init, x->bounds, x->algebra);
    ++checks;
    ++corpus_checks;
    agree += r.verdict != Verdict::hypothesis_failed && r.inclusion && *r.inclusion == r.leq.holds;
    holds += r.leq.holds;
  }
  return {agree == checks, std::to_string(agree) + "/" + std::to_string(checks) + " agree (50 random pairs both ways, " +
                               std::to_string(corpus_checks) + " corpus pairs; " + std::to_string(holds) +
                               " linearizable)"};
}

Result abstraction() {
  auto t0 = std::chrono::steady_clock::now();
  Program lock = load_program(corpus("lock_stack.json"));
  Program atomic = load_program(corpus("atomic_stack.json"));
  AbstractionInputs in{&lock.client, &lock.gamma, lock.client_init, &lock.library, lock.init, lock.algebra,
                       lock.bounds};
  AbstractionCheck r = abstraction_check_code(in, atomic.library, atomic.init);
  double s = seconds_since(t0);
  std::ostringstream d;
  d << to_string(r.verdict) << ", " << r.concrete_outcomes << " concrete runs against " << r.abstract_outcomes
    << " abstract runs, " << s << " s";
  if (r.verdict != Verdict::holds_at_bounds) d << "; " << r.detail;
  return {r.verdict == Verdict::holds_at_bounds && r.lin && r.lin->verdict == Verdict::holds_at_bounds && s < 300, d.str()};
}

Result frame_rule() {
  Program lock = load_program(corpus("lock_stack.json"));
  Program atomic = load_program(corpus("atomic_stack.json"));
  SpecExtensionFile sx = load_spec_extension(corpus("stack_ext.json"), lock.algebra, 2);
  FrameReport st = frame_check(FrameInputs{&lock.library, &atomic.library, &sx.base, &sx.extended, lock.init,
                                           atomic.init, sx.extra_init, lock.bounds, lock.algebra});
  // the conclusion is "holds"; it must coincide with the direct verdict
  bool stack_ok = st.hypotheses_ok() && st.direct && st.direct->verdict == Verdict::holds_at_bounds &&
                  st.lemmas.passed();

  Program alloc = load_program(corpus("allocator.json"));
  SpecExtensionFile ax = load_spec_extension(corpus("allocator_ext.json"), alloc.algebra, 2);
  FrameReport al = frame_check(FrameInputs{&alloc.library, &alloc.library, &ax.base, &ax.extended, alloc.init,
                                           alloc.init, ax.extra_init, alloc.bounds, alloc.algebra});
  bool alloc_ok = !al.untouched.ok && al.witness && extra_eval(al.witness->ceiled, al.witness->extra).top();

  std::ostringstream d;
  d << "stack: " << to_string(st.verdict) << ", direct "
    << (st.direct ? to_string(st.direct->verdict) : std::string("not run")) << ", " << st.reconstructed
    << " reconstructed, " << st.lemmas.violations << " lemma failures; allocator: "
    << (al.untouched.ok ? "hypothesis (4) HOLDS" : "hypothesis (4) fails") << ", witness "
    << (al.witness ? to_string(al.witness->ceiled) + " step " + std::to_string(al.witness->index) : "none");
  return {stack_ok && alloc_ok, d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"algebra laws", algebra_laws},
      {"footprint calculus", footprint_laws},
      {"balancedness fixtures", balancedness},
      {"linearizability search vs brute force", lin_vs_brute},
      {"transformer validators", validators},
      {"local/global decomposition", local_global},
      {"rearrangement", rearrangement},
      {"bijection vs inclusion verdicts", two_verdicts},
      {"abstraction at desk scale", abstraction},
      {"frame rule", frame_rule},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    auto t0 = std::chrono::steady_clock::now();
    Result o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << " [" << name << "] " << o.detail << " ("
              << seconds_since(t0) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
