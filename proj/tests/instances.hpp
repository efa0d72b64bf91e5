#pragma once

// Random rearrangement instances shared by the unit tests and the
// acceptance binary.

#include <optional>
#include <random>
#include <vector>

#include "ownlin/fixtures.hpp"
#include "ownlin/footprint.hpp"
#include "ownlin/rearrange.hpp"
#include "ownlin/semantics.hpp"
#include "support.hpp"

namespace ownlin::testing {

struct LibraryRuns {
  Library lib;
  Spec spec = fixtures::buffer_spec();
  State s0 = fixtures::buffer_init();
  Bounds bounds{1, 2, 2, 10};
  std::vector<Trace> traces;    // annotated library-local traces
  std::set<History> histories;  // their histories
};

inline LibraryRuns library_runs(std::mt19937_64& rng) {
  LibraryRuns r;
  r.lib = fixtures::random_buffer_library(rng);
  TraceMachine m(&r.lib, nullptr, GenMode::library_local, r.bounds);
  auto d = eval_program(m, &r.spec, r.s0);
  if (d.faulted) throw std::logic_error("random library faulted: " + to_string(d.fault_trace));
  r.traces.assign(d.traces.begin(), d.traces.end());
  for (const auto& tr : r.traces) r.histories.insert(history(tr, AlgebraId::ram));
  return r;
}

struct RearrangeInstance {
  Trace lambda2;
  History target;
  Footprint target_foot;
};

/// A trace of the library with at least two threads active and a random
/// de-linearization of its history that it linearizes.
inline std::optional<RearrangeInstance> random_instance(const LibraryRuns& runs, std::mt19937_64& rng) {
  std::vector<const Trace*> busy;
  for (const auto& tr : runs.traces) {
    History h = history(tr, AlgebraId::ram);
    if (h.size() >= 4 && threads_of(h).size() == 2) busy.push_back(&tr);
  }
  if (busy.empty()) return std::nullopt;
  const Trace& tr = *busy[std::uniform_int_distribution<std::size_t>(0, busy.size() - 1)(rng)];
  History h2 = history(tr, AlgebraId::ram);
  Footprint l0 = delta(runs.s0);
  Footprint bigger = *foot_add(l0, delta(State::ram({{7, 0}})));
  for (int attempt = 0; attempt < 30; ++attempt) {
    History h = random_reordering(h2, rng);
    Footprint l = (rng() & 1) ? bigger : l0;
    if (h != h2 && is_balanced(h, l) && balanced_linearized_by({l, h}, {l0, h2})) return RearrangeInstance{tr, h, l};
  }
  return RearrangeInstance{tr, h2, l0};
}

struct InstanceOutcome {
  bool rearranged = false;   // produced a member with the target history
  bool oracle_found = false; // some enumerated trace has the target history
  bool assertion = false;    // a conflict or internal assertion fired
  std::string detail;
};

inline InstanceOutcome run_instance(const LibraryRuns& runs, const RearrangeInstance& in) {
  InstanceOutcome out;
  out.oracle_found = runs.histories.count(in.target) > 0;
  TraceMachine m(&runs.lib, nullptr, GenMode::library_local, runs.bounds);
  try {
    auto r = rearrange(m, runs.spec, runs.s0, in.lambda2, in.target, in.target_foot);
    out.rearranged = history(r.trace, AlgebraId::ram) == in.target && is_member(m, &runs.spec, r.trace, runs.s0);
    if (!out.rearranged) out.detail = "result check failed: " + to_string(r.trace);
  } catch (const RearrangeAssertion& e) {
    out.assertion = true;
    out.detail = e.what();
  } catch (const RearrangeInputError& e) {
    out.detail = e.what();
  }
  return out;
}

}  // namespace ownlin::testing
