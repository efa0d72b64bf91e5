#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ownlin/history.hpp"
#include "ownlin/lang.hpp"
#include "ownlin/semantics.hpp"

namespace ownlin {

/// Bounded checking never proves a property outright, hence the wording.
enum class Verdict : std::uint8_t { holds_at_bounds, violated, hypothesis_failed };

std::string to_string(Verdict v);
int exit_code(Verdict v);

struct LinCheck {
  Verdict verdict = Verdict::holds_at_bounds;
  std::string detail;
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  LeqReport leq;
  /// Exact-history inclusion with the footprint condition, computed
  /// independently of the bijection search. Absent unless both sets exist.
  std::optional<bool> inclusion;
};

/// Whether (L1 : gamma, i1) is linearized by (L2 : gamma, i2) at the bounds.
LinCheck check_lin_code(const Library& l1, const Spec& gamma, const std::vector<State>& i1, const Library& l2,
                        const std::vector<State>& i2, const Bounds& bounds, AlgebraId alg,
                        bool keep_entries = false);

/// Whether (L1 : gamma, i1) is linearized by the interface set h2.
LinCheck check_lin_interfaceset(const Library& l1, const Spec& gamma, const std::vector<State>& i1,
                                const InterfaceSet& h2, const Bounds& bounds, AlgebraId alg,
                                bool keep_entries = false);

/// Entries of `is` whose history is sequential except for invocations that
/// never return, which come last.
InterfaceSet sequential_part(const InterfaceSet& is);

struct AbstractionCheck {
  Verdict verdict = Verdict::holds_at_bounds;
  std::string detail;
  std::size_t concrete_outcomes = 0;
  std::size_t abstract_outcomes = 0;
  std::optional<LinCheck> lin;  // absent when linearizability was assumed
  /// First concrete (initial state, trace) with no abstract counterpart.
  std::optional<std::pair<State, Trace>> counterexample;
};

struct AbstractionInputs {
  const ClientProgram* client = nullptr;
  const Spec* gamma = nullptr;
  std::vector<State> client_init;
  const Library* l1 = nullptr;
  std::vector<State> i1;
  AlgebraId alg = AlgebraId::ram;
  Bounds bounds;
};

/// Every client projection of C(L1) from client_init * i1 appears among the
/// client projections of C(L2) from client_init * i2. With assume_lin the
/// linearizability hypothesis is taken for granted (negative controls).
AbstractionCheck abstraction_check_code(const AbstractionInputs& in, const Library& l2, const std::vector<State>& i2,
                                        bool assume_lin = false);

/// Every outcome (s, tau) of C(L1) has a client-local run kappa from the
/// client part of s with (l, history(kappa)) in h2, l compatible with that
/// client state, and client(tau) equivalent to ground(kappa).
AbstractionCheck abstraction_check_spec(const AbstractionInputs& in, const InterfaceSet& h2,
                                        bool assume_lin = false);

}  // namespace ownlin
