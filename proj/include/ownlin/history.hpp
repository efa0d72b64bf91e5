#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ownlin/algebra.hpp"
#include "ownlin/footprint.hpp"

namespace ownlin {

using MethodName = std::string;

enum class CallKind : std::uint8_t { call, ret };

struct InterfaceAction {
  ThreadId thread = 1;
  CallKind kind = CallKind::call;
  MethodName method;
  State state;

  bool is_call() const { return kind == CallKind::call; }
  bool is_ret() const { return kind == CallKind::ret; }
  /// "(1, call push [1:10, 10:0])"
  std::string to_string() const;

  friend bool operator==(const InterfaceAction&, const InterfaceAction&) = default;
  friend auto operator<=>(const InterfaceAction&, const InterfaceAction&) = default;
};

using History = std::vector<InterfaceAction>;

std::string to_string(const History& h);

struct BalancedHistory {
  Footprint initial;
  History history;

  friend bool operator==(const BalancedHistory&, const BalancedHistory&) = default;
  friend auto operator<=>(const BalancedHistory&, const BalancedHistory&) = default;
};

using InterfaceSet = std::set<BalancedHistory>;

/// rho as a sequence: witness[i] is the index in the second history that
/// action i of the first history is matched with.
using LinWitness = std::vector<std::size_t>;

bool check_well_formed(const History& h);
bool is_sequential(const History& h);
History project_thread(const History& h, ThreadId t);
std::set<ThreadId> threads_of(const History& h);

/// Footprint fold: add on calls, subtract on returns. Absent when a step is
/// undefined.
std::optional<Footprint> evaluate_footprint(const History& h, const Footprint& l);
bool is_balanced(const History& h, const Footprint& l);

/// Deterministic backtracking search for a witness of h being linearized by
/// h2. Indices of h are matched left to right against the smallest unused
/// equal action of h2.
std::optional<LinWitness> linearized_by(const History& h, const History& h2);
/// Checks the order constraints of a candidate witness.
bool is_lin_witness(const History& h, const History& h2, const LinWitness& rho);
/// Oracle: tries every label-preserving bijection.
bool linearized_by_bruteforce(const History& h, const History& h2);

bool balanced_linearized_by(const BalancedHistory& b1, const BalancedHistory& b2);

struct LeqEntry {
  BalancedHistory entry;
  std::optional<BalancedHistory> matched;
  LinWitness witness;
};

struct LeqReport {
  bool holds = true;
  std::vector<LeqEntry> entries;
  /// First entry of the left set with no match.
  std::optional<BalancedHistory> failing;
};

/// Every entry of a is linearized by some entry of b. With keep_entries the
/// report carries the per-entry witness table.
LeqReport interface_set_leq(const InterfaceSet& a, const InterfaceSet& b, bool keep_entries = false);
bool interface_set_leq_bool(const InterfaceSet& a, const InterfaceSet& b);

/// Inclusion form: every (l, H) in a has some (l', H) in b with l' below l.
bool interface_set_included(const InterfaceSet& a, const InterfaceSet& b);

}  // namespace ownlin
