#pragma once

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ownlin/history.hpp"
#include "ownlin/lang.hpp"
#include "ownlin/law_report.hpp"

namespace ownlin {

struct EvalOptions {
  /// Mutation used as a negative control: library-local returns hand the
  /// postcondition state to the client without giving it up.
  bool keep_returned = false;
};

struct ActionOutcome {
  State state;
  std::optional<State> annot;
};

/// Absent means the action faults.
using ActionResult = std::optional<std::vector<ActionOutcome>>;

/// One step of evaluation. `a` is a ground action; `spec` is required in the
/// local modes.
ActionResult eval_action(GenMode mode, const Spec* spec, const Action& a, const State& s,
                         const EvalOptions& opts = {});

struct EvalResult {
  bool faulted = false;
  /// (final state, annotated trace); empty means the trace is infeasible.
  std::set<std::pair<State, Trace>> outcomes;
};

EvalResult eval_trace(GenMode mode, const Spec* spec, const Trace& tr, const State& s, const EvalOptions& opts = {});

/// Final states of evaluating an annotated trace, following its annotations
/// at calls and checking them at returns. Empty when the annotated trace is
/// not produced from s; absent on a fault.
std::optional<std::set<State>> eval_annotated(GenMode mode, const Spec* spec, const Trace& tr, const State& s,
                                              const EvalOptions& opts = {});

/// Re-attaches annotations (one per interface action) to a ground trace.
Trace annotate(const Trace& ground_tr, const std::vector<State>& annots);

struct Outcome {
  State state;
  std::vector<State> annots;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Denotation {
  bool faulted = false;
  /// Ground trace whose last action faults.
  Trace fault_trace;
  /// Annotated traces of every feasible generated trace.
  std::set<Trace> traces;
};

/// Streams every feasible trace of the machine from s together with its
/// outcomes; generation and evaluation are fused so infeasible prefixes are
/// pruned. Returns the fault witness if some trace faults (exploration stops).
/// Outcomes rejected by `keep` are dropped along with their extensions, so a
/// fault reachable only through them goes unnoticed.
using OutcomeFilter = std::function<bool(const Trace&, const Outcome&)>;
std::optional<Trace> explore_outcomes(const TraceMachine& m, const Spec* spec, const State& s,
                                      const std::function<void(const Trace&, const std::vector<Outcome>&)>& visit,
                                      const EvalOptions& opts = {}, const OutcomeFilter& keep = {});

/// Fault search alone. Annotations do not affect faulting, so only the
/// reachable states are tracked.
std::optional<Trace> find_fault(const TraceMachine& m, const Spec* spec, const State& s, const EvalOptions& opts = {});

Denotation eval_program(const TraceMachine& m, const Spec* spec, const State& s, const EvalOptions& opts = {});
/// Same result computed by generating the full trace set first and then
/// evaluating each trace separately. Used as a cross-check.
Denotation eval_program_unfused(const TraceMachine& m, const Spec* spec, const State& s,
                                const EvalOptions& opts = {});

/// Whether the annotated trace is in the denotation from s.
bool is_member(const TraceMachine& m, const Spec* spec, const Trace& annotated, const State& s);

class UnsafeError : public std::runtime_error {
 public:
  UnsafeError(const std::string& what, State init, Trace trace)
      : std::runtime_error(what), initial(std::move(init)), fault_trace(std::move(trace)) {}
  State initial;
  Trace fault_trace;
};

/// {(delta(s0), history(lambda))} over the library-local denotation. Throws
/// UnsafeError when the library faults.
InterfaceSet interf(const Library& lib, const Spec& spec, const std::vector<State>& init, const Bounds& bounds,
                    AlgebraId alg, const EvalOptions& opts = {});

/// Bounds of the library-local side when it is combined with a client of
/// n threads: one most general client per client thread and enough loop
/// iterations that the trace length is the only cut-off.
Bounds library_side_bounds(const Bounds& b, int client_threads);

struct DecomposeReport {
  LawReport laws;
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  bool hypotheses_ok = true;
  std::string hypothesis_failure;
  bool equal() const { return hypotheses_ok && laws.first("equality") == nullptr; }
};

/// Compares the complete-program pairs (s, tau) from I0 * I1 with the
/// combination of client-local pairs from I0 and library-local pairs from I1,
/// and checks both existential corollaries.
DecomposeReport compose_decompose_check(const ClientProgram& client, const Library& lib, const Spec& spec,
                                        const std::vector<State>& i0, const std::vector<State>& i1,
                                        const Bounds& bounds, const EvalOptions& lib_opts = {});

/// All traces tau covering a client-local and a library-local trace with
/// equal histories, up to `max_len`.
std::vector<Trace> covers(const Trace& kappa, const Trace& lambda, std::size_t max_len);
/// Client segment first, then library segment, between interface actions.
Trace canonical_cover(const Trace& kappa, const Trace& lambda);
bool is_cover(const Trace& tau, const Trace& kappa, const Trace& lambda);

}  // namespace ownlin
