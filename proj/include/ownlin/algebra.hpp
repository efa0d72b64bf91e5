#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "ownlin/law_report.hpp"

namespace ownlin {

enum class AlgebraId : std::uint8_t { ram, ram_pi };

using Loc = std::int64_t;
using Val = std::int64_t;
using ThreadId = int;
/// Fractional permission, always an exact rational in (0, 1].
using Perm = boost::rational<std::int64_t>;

std::string to_string(AlgebraId alg);
AlgebraId parse_algebra(const std::string& text);

std::string perm_to_string(const Perm& p);
/// Accepts "1", "1/2", "3/4".
Perm parse_perm(const std::string& text);

/// Raised when states from different algebras meet in one operation.
class AlgebraMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Cell {
  Val val = 0;
  Perm perm{1};

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// An element of RAM or RAM_PI: a finite map from locations to cells, kept
/// sorted by location. For RAM every permission is 1 and is ignored.
class State {
 public:
  using Entry = std::pair<Loc, Cell>;

  State() = default;
  explicit State(AlgebraId alg) : alg_(alg) {}

  static State ram(std::initializer_list<std::pair<Loc, Val>> cells);
  static State ram_pi(std::initializer_list<std::tuple<Loc, Val, Perm>> cells);
  /// Builds a state from arbitrary entries; throws on duplicate or
  /// non-positive locations and on permissions outside (0, 1].
  static State from_entries(AlgebraId alg, std::vector<Entry> entries);

  AlgebraId algebra() const { return alg_; }
  const std::vector<Entry>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  const Cell* find(Loc loc) const;
  bool contains(Loc loc) const { return find(loc) != nullptr; }
  /// Copy with `loc` set to `cell` (inserted or overwritten).
  State with(Loc loc, Cell cell) const;
  State without(Loc loc) const;

  /// "[1:5, 2:7]" for RAM, "[42:(0,1/2)]" for RAM_PI.
  std::string to_string() const;

  friend bool operator==(const State& a, const State& b) {
    return a.alg_ == b.alg_ && a.cells_ == b.cells_;
  }
  friend std::strong_ordering operator<=>(const State& a, const State& b);

 private:
  AlgebraId alg_ = AlgebraId::ram;
  std::vector<Entry> cells_;
};

std::strong_ordering compare_perm(const Perm& a, const Perm& b);

/// Partial separating conjunction. Absent means undefined.
std::optional<State> star(const State& s1, const State& s2);
/// The unique s with star(s, s1) == s2, if any.
std::optional<State> state_sub(const State& s2, const State& s1);

struct Predicate {
  AlgebraId algebra = AlgebraId::ram;
  std::set<State> states;

  Predicate() = default;
  Predicate(AlgebraId alg, std::set<State> members);

  bool contains(const State& s) const { return states.count(s) != 0; }
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Thread-indexed predicate, p_t.
struct ParamPredicate {
  std::map<ThreadId, Predicate> by_thread;

  const Predicate& at(ThreadId t) const;
  friend bool operator==(const ParamPredicate&, const ParamPredicate&) = default;
};

Predicate pred_star(const Predicate& p, const Predicate& q);

/// The unique member of `p` that is a substate of `s`, assuming `p` is
/// precise. Absent when no member fits.
std::optional<State> carve(const State& s, const Predicate& p);

/// Bounded enumeration domain used by every brute-force check.
struct StateUniverse {
  std::vector<Loc> locs{1, 2, 3};
  std::vector<Val> vals{0, 1};
  std::vector<Perm> perms{Perm(1, 2), Perm(1)};

  /// All states over the universe, in canonical order.
  std::vector<State> enumerate(AlgebraId alg) const;
  /// Adds every location, value and permission mentioned by `states`.
  StateUniverse extended_with(std::span<const State> states) const;
};

bool is_precise(const Predicate& p, const StateUniverse& universe);
bool is_precise(const ParamPredicate& p, const StateUniverse& universe);

using StarFn = std::function<std::optional<State>(const State&, const State&)>;

/// Exhaustive commutativity, associativity, cancellativity and unit check
/// of `op` over `states`. Equalities are Kleene equalities.
LawReport check_algebra_laws(std::span<const State> states, const State& unit, const StarFn& op);
LawReport algebra_law_check(AlgebraId alg, const StateUniverse& universe);

/// Deliberately broken composition that keeps the left cell on overlap.
/// Negative control for the law checkers.
std::optional<State> overlap_keep_left(const State& s1, const State& s2);

}  // namespace ownlin
