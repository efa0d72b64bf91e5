#include "ownlin/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace ownlin {

std::string to_string(AlgebraId alg) { return alg == AlgebraId::ram ? "ram" : "ram_pi"; }

AlgebraId parse_algebra(const std::string& text) {
  if (text == "ram" || text == "RAM") return AlgebraId::ram;
  if (text == "ram_pi" || text == "RAM_PI") return AlgebraId::ram_pi;
  throw std::invalid_argument("unknown algebra '" + text + "'");
}

std::string perm_to_string(const Perm& p) {
  if (p.denominator() == 1) return std::to_string(p.numerator());
  return std::to_string(p.numerator()) + "/" + std::to_string(p.denominator());
}

Perm parse_perm(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Perm(std::stoll(text));
    return Perm(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad permission '" + text + "'");
  }
}

std::strong_ordering compare_perm(const Perm& a, const Perm& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {

void require_same(const State& a, const State& b) {
  if (a.algebra() != b.algebra()) {
    throw AlgebraMismatch("states from different algebras: " + a.to_string() + " and " + b.to_string());
  }
}

const Perm kFull{1};
const Perm kZero{0};

}  // namespace

State State::ram(std::initializer_list<std::pair<Loc, Val>> cells) {
  std::vector<Entry> entries;
  for (const auto& [loc, val] : cells) entries.push_back({loc, Cell{val, kFull}});
  return from_entries(AlgebraId::ram, std::move(entries));
}

State State::ram_pi(std::initializer_list<std::tuple<Loc, Val, Perm>> cells) {
  std::vector<Entry> entries;
  for (const auto& [loc, val, perm] : cells) entries.push_back({loc, Cell{val, perm}});
  return from_entries(AlgebraId::ram_pi, std::move(entries));
}

State State::from_entries(AlgebraId alg, std::vector<Entry> entries) {
  State s(alg);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& [loc, cell] = entries[i];
    if (loc < 1) throw std::invalid_argument("location must be >= 1, got " + std::to_string(loc));
    if (i > 0 && entries[i - 1].first == loc) {
      throw std::invalid_argument("duplicate location " + std::to_string(loc));
    }
    if (alg == AlgebraId::ram) {
      cell.perm = kFull;
    } else if (!(kZero < cell.perm) || kFull < cell.perm) {
      throw std::invalid_argument("permission out of (0,1]: " + perm_to_string(cell.perm));
    }
  }
  s.cells_ = std::move(entries);
  return s;
}

const Cell* State::find(Loc loc) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), loc,
                             [](const Entry& e, Loc l) { return e.first < l; });
  if (it == cells_.end() || it->first != loc) return nullptr;
  return &it->second;
}

State State::with(Loc loc, Cell cell) const {
  if (loc < 1) throw std::invalid_argument("location must be >= 1, got " + std::to_string(loc));
  if (alg_ == AlgebraId::ram) cell.perm = kFull;
  State out = *this;
  auto it = std::lower_bound(out.cells_.begin(), out.cells_.end(), loc,
                             [](const Entry& e, Loc l) { return e.first < l; });
  if (it != out.cells_.end() && it->first == loc) {
    it->second = cell;
  } else {
    out.cells_.insert(it, {loc, cell});
  }
  return out;
}

State State::without(Loc loc) const {
  State out = *this;
  std::erase_if(out.cells_, [loc](const Entry& e) { return e.first == loc; });
  return out;
}

std::string State::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (i) os << ", ";
    const auto& [loc, cell] = cells_[i];
    os << loc << ':';
    if (alg_ == AlgebraId::ram) {
      os << cell.val;
    } else {
      os << '(' << cell.val << ',' << perm_to_string(cell.perm) << ')';
    }
  }
  os << ']';
  return os.str();
}

std::strong_ordering operator<=>(const State& a, const State& b) {
  if (auto c = a.alg_ <=> b.alg_; c != 0) return c;
  return std::lexicographical_compare_three_way(
      a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end(),
      [](const State::Entry& x, const State::Entry& y) {
        if (auto c = x.first <=> y.first; c != 0) return c;
        if (auto c = x.second.val <=> y.second.val; c != 0) return c;
        return compare_perm(x.second.perm, y.second.perm);
      });
}

std::optional<State> star(const State& s1, const State& s2) {
  require_same(s1, s2);
  const bool pi = s1.algebra() == AlgebraId::ram_pi;
  std::vector<State::Entry> out;
  out.reserve(s1.size() + s2.size());
  auto a = s1.cells().begin(), ae = s1.cells().end();
  auto b = s2.cells().begin(), be = s2.cells().end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == ae || b->first < a->first) {
      out.push_back(*b++);
    } else {
      if (!pi || a->second.val != b->second.val) return std::nullopt;
      Perm sum = a->second.perm + b->second.perm;
      if (kFull < sum) return std::nullopt;
      out.push_back({a->first, Cell{a->second.val, sum}});
      ++a;
      ++b;
    }
  }
  State s = State(s1.algebra());
  return State::from_entries(s1.algebra(), std::move(out));
}

std::optional<State> state_sub(const State& s2, const State& s1) {
  require_same(s1, s2);
  const bool pi = s2.algebra() == AlgebraId::ram_pi;
  std::vector<State::Entry> out;
  auto a = s2.cells().begin(), ae = s2.cells().end();
  auto b = s1.cells().begin(), be = s1.cells().end();
  for (; b != be; ++b) {
    while (a != ae && a->first < b->first) out.push_back(*a++);
    if (a == ae || a->first != b->first) return std::nullopt;
    if (a->second.val != b->second.val) return std::nullopt;
    if (pi) {
      if (a->second.perm < b->second.perm) return std::nullopt;
      if (b->second.perm < a->second.perm) {
        out.push_back({a->first, Cell{a->second.val, a->second.perm - b->second.perm}});
      }
    }
    ++a;
  }
  out.insert(out.end(), a, ae);
  return State::from_entries(s2.algebra(), std::move(out));
}

Predicate::Predicate(AlgebraId alg, std::set<State> members) : algebra(alg), states(std::move(members)) {
  for (const auto& s : states) {
    if (s.algebra() != alg) throw AlgebraMismatch("predicate member " + s.to_string() + " has wrong algebra");
  }
}

const Predicate& ParamPredicate::at(ThreadId t) const {
  auto it = by_thread.find(t);
  if (it == by_thread.end()) {
    throw std::out_of_range("parameterised predicate undefined for thread " + std::to_string(t));
  }
  return it->second;
}

Predicate pred_star(const Predicate& p, const Predicate& q) {
  if (p.algebra != q.algebra) throw AlgebraMismatch("pred_star across algebras");
  Predicate out;
  out.algebra = p.algebra;
  for (const auto& a : p.states) {
    for (const auto& b : q.states) {
      if (auto s = star(a, b)) out.states.insert(std::move(*s));
    }
  }
  return out;
}

std::optional<State> carve(const State& s, const Predicate& p) {
  for (const auto& member : p.states) {
    if (state_sub(s, member)) return member;
  }
  return std::nullopt;
}

std::vector<State> StateUniverse::enumerate(AlgebraId alg) const {
  std::vector<Cell> choices;
  for (Val v : vals) {
    if (alg == AlgebraId::ram) {
      choices.push_back(Cell{v, kFull});
    } else {
      for (const Perm& p : perms) choices.push_back(Cell{v, p});
    }
  }
  std::vector<std::vector<State::Entry>> partial{{}};
  for (Loc loc : locs) {
    std::vector<std::vector<State::Entry>> next;
    next.reserve(partial.size() * (choices.size() + 1));
    for (const auto& entries : partial) {
      next.push_back(entries);
      for (const auto& c : choices) {
        auto extended = entries;
        extended.push_back({loc, c});
        next.push_back(std::move(extended));
      }
    }
    partial = std::move(next);
  }
  std::vector<State> out;
  out.reserve(partial.size());
  for (auto& entries : partial) out.push_back(State::from_entries(alg, std::move(entries)));
  std::sort(out.begin(), out.end());
  return out;
}

StateUniverse StateUniverse::extended_with(std::span<const State> states) const {
  StateUniverse u = *this;
  for (const auto& s : states) {
    for (const auto& [loc, cell] : s.cells()) {
      u.locs.push_back(loc);
      u.vals.push_back(cell.val);
      if (s.algebra() == AlgebraId::ram_pi) u.perms.push_back(cell.perm);
    }
  }
  auto uniq = [](auto& v, auto less) {
    std::sort(v.begin(), v.end(), less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(u.locs, std::less<>{});
  uniq(u.vals, std::less<>{});
  uniq(u.perms, [](const Perm& a, const Perm& b) { return a < b; });
  return u;
}

bool is_precise(const Predicate& p, const StateUniverse& universe) {
  if (p.states.size() <= 1) return true;
  std::vector<State> members(p.states.begin(), p.states.end());
  // Members' own locations and values are added so that every state that
  // could host two members is inside the enumeration.
  StateUniverse u = universe.extended_with(members);
  for (const auto& sigma : u.enumerate(p.algebra)) {
    int fits = 0;
    for (const auto& m : members) {
      if (state_sub(sigma, m) && ++fits > 1) return false;
    }
  }
  return true;
}

bool is_precise(const ParamPredicate& p, const StateUniverse& universe) {
  return std::all_of(p.by_thread.begin(), p.by_thread.end(),
                     [&](const auto& kv) { return is_precise(kv.second, universe); });
}

namespace {

std::string show(const std::optional<State>& s) { return s ? s->to_string() : std::string("undefined"); }

bool kleene_eq(const std::optional<State>& a, const std::optional<State>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

}  // namespace

LawReport check_algebra_laws(std::span<const State> states, const State& unit, const StarFn& op) {
  LawReport report;
  for (const auto& s : states) {
    ++report.cases;
    auto r = op(s, unit);
    if (!kleene_eq(r, s)) report.fail("unit", s.to_string() + " * e", s.to_string(), show(r));
    auto l = op(unit, s);
    if (!kleene_eq(l, s)) report.fail("unit", "e * " + s.to_string(), s.to_string(), show(l));
  }
  for (const auto& a : states) {
    std::map<State, const State*> seen;
    for (const auto& b : states) {
      ++report.cases;
      auto ab = op(a, b);
      auto ba = op(b, a);
      if (!kleene_eq(ab, ba)) {
        report.fail("commutativity", a.to_string() + " * " + b.to_string(), show(ba), show(ab));
      }
      if (ab) {
        auto [it, inserted] = seen.emplace(*ab, &b);
        if (!inserted && !(*it->second == b)) {
          report.fail("cancellativity", a.to_string() + " * {" + it->second->to_string() + ", " + b.to_string() + "}",
                      "distinct results", "both " + ab->to_string());
        }
      }
      for (const auto& c : states) {
        ++report.cases;
        std::optional<State> left = ab ? op(*ab, c) : std::nullopt;
        auto bc = op(b, c);
        std::optional<State> right = bc ? op(a, *bc) : std::nullopt;
        if (!kleene_eq(left, right)) {
          report.fail("associativity", a.to_string() + ", " + b.to_string() + ", " + c.to_string(), show(right),
                      show(left));
        }
      }
    }
  }
  return report;
}

LawReport algebra_law_check(AlgebraId alg, const StateUniverse& universe) {
  auto states = universe.enumerate(alg);
  return check_algebra_laws(states, State(alg), [](const State& a, const State& b) { return star(a, b); });
}

std::optional<State> overlap_keep_left(const State& s1, const State& s2) {
  State out = s1;
  for (const auto& [loc, cell] : s2.cells()) {
    if (!out.contains(loc)) out = out.with(loc, cell);
  }
  return out;
}

}  // namespace ownlin
