#include "ownlin/footprint.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ownlin {

namespace {

const Perm kOne{1};
const Perm kZero{0};

std::strong_ordering compare_cell(const FootCell& a, const FootCell& b) {
  // full sorts after every partial entry
  if (a.full != b.full) return a.full ? std::strong_ordering::greater : std::strong_ordering::less;
  if (a.full) return std::strong_ordering::equal;
  if (auto c = compare_perm(a.perm, b.perm); c != 0) return c;
  return a.val <=> b.val;
}

FootCell normalise(Perm p, Val v) { return p == kOne ? FootCell::whole() : FootCell::partial(p, v); }

void require_same(const Footprint& a, const Footprint& b) {
  if (a.algebra() != b.algebra()) throw AlgebraMismatch("footprints from different algebras");
}

}  // namespace

Footprint Footprint::ram(std::initializer_list<Loc> locs) {
  std::vector<Entry> entries;
  for (Loc l : locs) entries.push_back({l, FootCell::whole()});
  return from_entries(AlgebraId::ram, std::move(entries));
}

Footprint Footprint::from_entries(AlgebraId alg, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [loc, cell] = entries[i];
    if (loc < 1) throw std::invalid_argument("location must be >= 1");
    if (i > 0 && entries[i - 1].first == loc) throw std::invalid_argument("duplicate location " + std::to_string(loc));
    if (cell.full) {
      if (cell.perm != kOne || cell.val != 0) throw std::invalid_argument("full footprint cell carries data");
    } else {
      if (alg == AlgebraId::ram) throw std::invalid_argument("partial footprint cell in RAM");
      if (!(kZero < cell.perm && cell.perm < kOne)) throw std::invalid_argument("partial permission out of (0,1)");
    }
  }
  Footprint f(alg);
  f.entries_ = std::move(entries);
  return f;
}

const FootCell* Footprint::find(Loc loc) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), loc,
                             [](const Entry& e, Loc l) { return e.first < l; });
  if (it == entries_.end() || it->first != loc) return nullptr;
  return &it->second;
}

std::string Footprint::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << (alg_ == AlgebraId::ram ? "," : ", ");
    const auto& [loc, cell] = entries_[i];
    os << loc;
    if (alg_ == AlgebraId::ram_pi) {
      if (cell.full) {
        os << ":full";
      } else {
        os << ':' << perm_to_string(cell.perm) << '@' << cell.val;
      }
    }
  }
  os << '}';
  return os.str();
}

std::strong_ordering operator<=>(const Footprint& a, const Footprint& b) {
  if (auto c = a.alg_ <=> b.alg_; c != 0) return c;
  return std::lexicographical_compare_three_way(
      a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
      [](const Footprint::Entry& x, const Footprint::Entry& y) {
        if (auto c = x.first <=> y.first; c != 0) return c;
        return compare_cell(x.second, y.second);
      });
}

Footprint delta(const State& s) {
  std::vector<Footprint::Entry> out;
  out.reserve(s.size());
  for (const auto& [loc, cell] : s.cells()) out.push_back({loc, normalise(cell.perm, cell.val)});
  return Footprint::from_entries(s.algebra(), std::move(out));
}

std::optional<Footprint> foot_add(const Footprint& l1, const Footprint& l2) {
  require_same(l1, l2);
  std::vector<Footprint::Entry> out;
  auto a = l1.entries().begin(), ae = l1.entries().end();
  auto b = l2.entries().begin(), be = l2.entries().end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == ae || b->first < a->first) {
      out.push_back(*b++);
    } else {
      const FootCell &x = a->second, &y = b->second;
      if (x.full || y.full || x.val != y.val) return std::nullopt;
      Perm sum = x.perm + y.perm;
      if (kOne < sum) return std::nullopt;
      out.push_back({a->first, normalise(sum, x.val)});
      ++a;
      ++b;
    }
  }
  return Footprint::from_entries(l1.algebra(), std::move(out));
}

std::optional<Footprint> foot_sub(const Footprint& l2, const Footprint& l1) {
  require_same(l1, l2);
  std::vector<Footprint::Entry> out;
  auto a = l2.entries().begin(), ae = l2.entries().end();
  for (const auto& [loc, y] : l1.entries()) {
    while (a != ae && a->first < loc) out.push_back(*a++);
    if (a == ae || a->first != loc) return std::nullopt;
    const FootCell& x = a->second;
    if (y.full) {
      if (!x.full) return std::nullopt;
    } else if (x.full) {
      out.push_back({loc, FootCell::partial(kOne - y.perm, y.val)});
    } else {
      if (x.val != y.val || x.perm < y.perm) return std::nullopt;
      if (y.perm < x.perm) out.push_back({loc, FootCell::partial(x.perm - y.perm, x.val)});
    }
    ++a;
  }
  out.insert(out.end(), a, ae);
  return Footprint::from_entries(l2.algebra(), std::move(out));
}

bool foot_leq(const Footprint& l1, const Footprint& l2) { return foot_sub(l2, l1).has_value(); }

State representative(const Footprint& l) {
  std::vector<State::Entry> cells;
  for (const auto& [loc, c] : l.entries()) cells.push_back({loc, Cell{c.full ? 0 : c.val, c.perm}});
  return State::from_entries(l.algebra(), std::move(cells));
}

Footprint min_loc_delta(const State& s) {
  Footprint full = delta(s);
  if (full.empty()) return full;
  return Footprint::from_entries(s.algebra(), {full.entries().front()});
}

namespace {

template <class T>
std::string show(const std::optional<T>& x) {
  return x ? x->to_string() : std::string("undefined");
}

template <class T>
bool kleene_eq(const std::optional<T>& a, const std::optional<T>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

}  // namespace

LawReport check_footprint_laws(std::span<const State> states, const StarFn& op, const DeltaFn& delta_fn) {
  LawReport report;
  const std::size_t n = states.size();
  std::vector<Footprint> feet;
  feet.reserve(n);
  for (const auto& s : states) feet.push_back(delta_fn(s));

  // Equal footprints must compose with exactly the same states.
  std::map<Footprint, std::pair<std::size_t, std::vector<bool>>> signature;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> sig(n);
    for (std::size_t j = 0; j < n; ++j) sig[j] = op(states[i], states[j]).has_value();
    report.cases += n;
    auto [it, inserted] = signature.emplace(feet[i], std::make_pair(i, sig));
    if (inserted) continue;
    const auto& [rep, rep_sig] = it->second;
    for (std::size_t j = 0; j < n; ++j) {
      if (rep_sig[j] != sig[j]) {
        report.fail("footprint-compat",
                    states[rep].to_string() + " vs " + states[i].to_string() + " against " + states[j].to_string(),
                    rep_sig[j] ? "defined" : "undefined", sig[j] ? "defined" : "undefined");
        break;
      }
    }
  }

  // (delta(s1*s2), delta(s1)) must determine delta(s2).
  std::map<std::pair<Footprint, Footprint>, std::pair<Footprint, std::pair<std::size_t, std::size_t>>> cancel;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto c = op(states[i], states[j]);
      if (!c) continue;
      ++report.cases;
      auto key = std::make_pair(delta_fn(*c), feet[i]);
      auto [it, inserted] = cancel.emplace(key, std::make_pair(feet[j], std::make_pair(i, j)));
      if (!inserted && !(it->second.first == feet[j])) {
        auto [pi, pj] = it->second.second;
        report.fail("footprint-cancellativity",
                    states[pi].to_string() + " * " + states[pj].to_string() + " vs " + states[i].to_string() + " * " +
                        states[j].to_string(),
                    it->second.first.to_string(), feet[j].to_string());
      }
    }
  }
  return report;
}

LawReport footprint_law_check(AlgebraId alg, const StateUniverse& universe) {
  auto states = universe.enumerate(alg);
  LawReport report = check_footprint_laws(states, [](const State& a, const State& b) { return star(a, b); },
                                          [](const State& s) { return delta(s); });

  std::set<Footprint> foot_set;
  for (const auto& s : states) foot_set.insert(delta(s));
  std::vector<Footprint> feet(foot_set.begin(), foot_set.end());

  // foot_add against delta(s1 * s2).
  for (const auto& a : states) {
    for (const auto& b : states) {
      ++report.cases;
      auto c = star(a, b);
      std::optional<Footprint> want = c ? std::optional<Footprint>(delta(*c)) : std::nullopt;
      auto got = foot_add(delta(a), delta(b));
      if (!kleene_eq(want, got)) {
        report.fail("foot_add-agreement", a.to_string() + " * " + b.to_string(), show(want), show(got));
      }
    }
  }

  // foot_sub against a search for s2 = s1 * s over universe representatives.
  std::map<std::pair<Footprint, Footprint>, std::set<Footprint>> sub_oracle;
  for (const auto& s1 : states) {
    for (const auto& s : states) {
      if (auto s2 = star(s1, s)) sub_oracle[{delta(*s2), delta(s1)}].insert(delta(s));
    }
  }
  for (const auto& l2 : feet) {
    for (const auto& l1 : feet) {
      ++report.cases;
      auto got = foot_sub(l2, l1);
      auto it = sub_oracle.find({l2, l1});
      std::optional<Footprint> want;
      if (it != sub_oracle.end()) {
        if (it->second.size() != 1) {
          report.fail("foot_sub-agreement", l2.to_string() + " \\\\ " + l1.to_string(), "unique result",
                      std::to_string(it->second.size()) + " results");
          continue;
        }
        want = *it->second.begin();
      }
      // Results outside the universe cannot be confirmed by search.
      if (!want && got && !foot_set.count(*got)) continue;
      if (!kleene_eq(want, got)) {
        report.fail("foot_sub-agreement", l2.to_string() + " \\\\ " + l1.to_string(), show(want), show(got));
      }
    }
  }

  // (l1 o l2) \\ l3 = (l1 \\ l3) o l2 whenever both sides' premises hold.
  for (const auto& l1 : feet) {
    for (const auto& l2 : feet) {
      auto s12 = foot_add(l1, l2);
      if (!s12) continue;
      for (const auto& l3 : feet) {
        auto d13 = foot_sub(l1, l3);
        if (!d13) continue;
        ++report.cases;
        auto left = foot_sub(*s12, l3);
        auto right = foot_add(*d13, l2);
        if (!kleene_eq(left, right)) {
          report.fail("distribution", l1.to_string() + ", " + l2.to_string() + ", " + l3.to_string(), show(right),
                      show(left));
        }
      }
    }
  }
  return report;
}

}  // namespace ownlin
