#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ownlin/checker.hpp"
#include "ownlin/history.hpp"
#include "ownlin/lang.hpp"
#include "ownlin/law_report.hpp"

namespace ownlin {

/// Every extended pre/post member splits into a base member and a rest.
/// Method names and thread sets must coincide.
bool extends(const Spec& extended, const Spec& base);

/// A base specification together with one that extends it.
class SpecExtension {
 public:
  /// Throws std::invalid_argument unless `extended` extends `base`.
  SpecExtension(Spec base, Spec extended);
  const Spec& base() const { return base_; }
  const Spec& extended() const { return extended_; }

 private:
  Spec base_;
  Spec extended_;
};

/// The transferred state of an action does not contain a member of the base
/// predicate it is checked against.
class FrameViolation : public std::runtime_error {
 public:
  FrameViolation(const std::string& what, InterfaceAction a) : std::runtime_error(what), action(std::move(a)) {}
  InterfaceAction action;
};

/// The part of the transferred state the base spec asks for.
InterfaceAction floor_action(const InterfaceAction& a, const Spec& base);
/// Everything else.
InterfaceAction ceil_action(const InterfaceAction& a, const Spec& base);
History floor_history(const History& h, const Spec& base);
History ceil_history(const History& h, const Spec& base);
/// Maps the annotations of an annotated trace.
Trace floor_trace(const Trace& tr, const Spec& base);
Trace ceil_trace(const Trace& tr, const Spec& base);

struct ExtraEval {
  std::optional<State> state;  // absent is the error value
  std::size_t failed_at = 0;
  std::string failure;
  bool top() const { return !state.has_value(); }
};

/// Starts from s, adds the extra piece at every call and takes it back at
/// every return.
ExtraEval extra_eval(const History& ceiled, const State& s);

struct FrameInputs {
  const Library* l1 = nullptr;
  const Library* l2 = nullptr;
  const Spec* base = nullptr;
  const Spec* extended = nullptr;
  std::vector<State> i1;
  std::vector<State> i2;
  std::vector<State> extra;
  Bounds bounds;
  AlgebraId alg = AlgebraId::ram;
};

struct Hypothesis {
  bool ok = true;
  std::string detail;
};

struct ExtraWitness {
  State init;
  State extra;
  Trace trace;  // annotated, of L1 under the extended spec
  History ceiled;
  std::size_t index = 0;
  std::string failure;
};

struct FrameReport {
  Hypothesis extends;      // (1)
  Hypothesis safety;       // (2)
  Hypothesis base_lin;     // (3)
  Hypothesis untouched;    // (4)
  std::optional<ExtraWitness> witness;
  std::optional<LinCheck> base_check;
  /// Linearizability under the extended spec checked directly; run whenever
  /// both libraries are safe under it.
  std::optional<LinCheck> direct;
  /// "floor-membership" and "reconstruction" over the enumerated traces.
  LawReport lemmas;
  std::size_t traces = 0;
  std::size_t reconstructed = 0;
  /// Floor histories whose L2 counterpart lies beyond the bounds.
  std::size_t unreached = 0;
  Verdict verdict = Verdict::holds_at_bounds;
  std::string detail;

  bool hypotheses_ok() const { return extends.ok && safety.ok && base_lin.ok && untouched.ok; }
  /// The conclusion is confirmed by the direct check.
  bool agrees() const { return hypotheses_ok() && direct && direct->verdict == Verdict::holds_at_bounds; }
};

FrameReport frame_check(const FrameInputs& in);

/// All defined s * s' over the two lists.
std::vector<State> star_all(const std::vector<State>& a, const std::vector<State>& b);

}  // namespace ownlin
