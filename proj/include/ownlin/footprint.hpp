#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ownlin/algebra.hpp"
#include "ownlin/law_report.hpp"

namespace ownlin {

/// Per-location footprint entry. RAM entries are always full. A partial entry
/// (RAM_PI only) has perm < 1 and remembers the value, since read-shared cells
/// must agree on it.
struct FootCell {
  bool full = true;
  Perm perm{1};
  Val val = 0;

  static FootCell whole() { return {}; }
  static FootCell partial(Perm p, Val v) { return {false, p, v}; }

  friend bool operator==(const FootCell&, const FootCell&) = default;
};

class Footprint {
 public:
  using Entry = std::pair<Loc, FootCell>;

  Footprint() = default;
  explicit Footprint(AlgebraId alg) : alg_(alg) {}

  static Footprint ram(std::initializer_list<Loc> locs);
  /// Throws on duplicate locations, partial entries in RAM, or partial
  /// permissions outside (0, 1).
  static Footprint from_entries(AlgebraId alg, std::vector<Entry> entries);

  AlgebraId algebra() const { return alg_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const FootCell* find(Loc loc) const;

  /// "{1,2}" for RAM, "{42:1/2@0, 7:full}" for RAM_PI.
  std::string to_string() const;

  friend bool operator==(const Footprint& a, const Footprint& b) {
    return a.alg_ == b.alg_ && a.entries_ == b.entries_;
  }
  friend std::strong_ordering operator<=>(const Footprint& a, const Footprint& b);

 private:
  AlgebraId alg_ = AlgebraId::ram;
  std::vector<Entry> entries_;
};

Footprint delta(const State& s);
std::optional<Footprint> foot_add(const Footprint& l1, const Footprint& l2);
/// l2 \\ l1: the l with foot_add(l, l1) == l2.
std::optional<Footprint> foot_sub(const Footprint& l2, const Footprint& l1);
bool foot_leq(const Footprint& l1, const Footprint& l2);

/// A state with footprint l (values of full cells set to 0).
State representative(const Footprint& l);

using DeltaFn = std::function<Footprint(const State&)>;

/// Checks that equal footprints compose with the same states and that `op`
/// is cancellative on footprints, over `states`.
LawReport check_footprint_laws(std::span<const State> states, const StarFn& op, const DeltaFn& delta_fn);

/// Everything above plus agreement of foot_add / foot_sub with their
/// representative-based definitions and the distribution law
/// (l1 o l2) \\ l3 = (l1 \\ l3) o l2 over all universe footprints.
LawReport footprint_law_check(AlgebraId alg, const StateUniverse& universe);

/// Broken footprint that only remembers the smallest location. Negative
/// control for check_footprint_laws.
Footprint min_loc_delta(const State& s);

}  // namespace ownlin
