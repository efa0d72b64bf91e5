#include "ownlin/frame.hpp"

#include <map>
#include <set>
#include <tuple>

#include "ownlin/footprint.hpp"
#include "ownlin/semantics.hpp"

namespace ownlin {

namespace {

bool splits_all(const Predicate& ext, const Predicate& base) {
  for (const auto& r : ext.states) {
    if (!carve(r, base)) return false;
  }
  return true;
}

bool splits_all(const ParamPredicate& ext, const ParamPredicate& base) {
  if (ext.by_thread.size() != base.by_thread.size()) return false;
  for (const auto& [t, p] : ext.by_thread) {
    auto it = base.by_thread.find(t);
    if (it == base.by_thread.end() || !splits_all(p, it->second)) return false;
  }
  return true;
}

const Predicate& base_pred(const InterfaceAction& a, const Spec& base) {
  auto it = base.find(a.method);
  if (it == base.end()) throw FrameViolation("no base specification for " + a.method, a);
  const ParamPredicate& p = a.is_call() ? it->second.pre : it->second.post;
  auto pt = p.by_thread.find(a.thread);
  if (pt == p.by_thread.end()) {
    throw FrameViolation("no base predicate for thread " + std::to_string(a.thread), a);
  }
  return pt->second;
}

// (piece required by the base spec, the rest)
std::pair<State, State> split(const InterfaceAction& a, const Spec& base) {
  auto piece = carve(a.state, base_pred(a, base));
  if (!piece) throw FrameViolation("transferred state does not split: " + a.to_string(), a);
  return {*piece, *state_sub(a.state, *piece)};
}

Trace map_annots(const Trace& tr, const Spec& base, bool floor) {
  Trace out = tr;
  for (auto& a : out) {
    if (!a.is_interface()) continue;
    InterfaceAction ia{a.thread, a.kind == ActKind::call ? CallKind::call : CallKind::ret, a.method,
                       a.annot.value_or(State())};
    auto [piece, rest] = split(ia, base);
    a.annot = floor ? piece : rest;
  }
  return out;
}

std::vector<State> annotations(const History& h) {
  std::vector<State> out;
  out.reserve(h.size());
  for (const auto& a : h) out.push_back(a.state);
  return out;
}

}  // namespace

bool extends(const Spec& extended, const Spec& base) {
  if (extended.size() != base.size()) return false;
  for (const auto& [m, ms] : extended) {
    auto it = base.find(m);
    if (it == base.end()) return false;
    if (!splits_all(ms.pre, it->second.pre) || !splits_all(ms.post, it->second.post)) return false;
  }
  return true;
}

SpecExtension::SpecExtension(Spec base, Spec extended) : base_(std::move(base)), extended_(std::move(extended)) {
  if (!extends(extended_, base_)) throw std::invalid_argument("specification does not extend its base");
}

InterfaceAction floor_action(const InterfaceAction& a, const Spec& base) {
  InterfaceAction out = a;
  out.state = split(a, base).first;
  return out;
}

InterfaceAction ceil_action(const InterfaceAction& a, const Spec& base) {
  InterfaceAction out = a;
  out.state = split(a, base).second;
  return out;
}

History floor_history(const History& h, const Spec& base) {
  History out;
  out.reserve(h.size());
  for (const auto& a : h) out.push_back(floor_action(a, base));
  return out;
}

History ceil_history(const History& h, const Spec& base) {
  History out;
  out.reserve(h.size());
  for (const auto& a : h) out.push_back(ceil_action(a, base));
  return out;
}

Trace floor_trace(const Trace& tr, const Spec& base) { return map_annots(tr, base, true); }
Trace ceil_trace(const Trace& tr, const Spec& base) { return map_annots(tr, base, false); }

ExtraEval extra_eval(const History& ceiled, const State& s) {
  ExtraEval out;
  State cur = s;
  for (std::size_t i = 0; i < ceiled.size(); ++i) {
    const auto& a = ceiled[i];
    auto next = a.is_call() ? star(cur, a.state) : state_sub(cur, a.state);
    if (!next) {
      out.failed_at = i;
      out.failure = (a.is_call() ? cur.to_string() + " * " : cur.to_string() + " \\ ") + a.state.to_string() +
                    " undefined at " + a.to_string();
      return out;
    }
    cur = std::move(*next);
  }
  out.state = std::move(cur);
  return out;
}

std::vector<State> star_all(const std::vector<State>& a, const std::vector<State>& b) {
  std::vector<State> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (auto s = star(x, y)) out.push_back(std::move(*s));
    }
  }
  return out;
}

namespace {

void fail(Hypothesis& h, const std::string& why) {
  if (h.ok) h.detail = why;
  h.ok = false;
}

std::optional<std::string> fault_of(const Library& lib, const Spec& gamma, const std::vector<State>& init,
                                    const Bounds& b) {
  TraceMachine m(&lib, nullptr, GenMode::library_local, b);
  for (const auto& s : init) {
    if (auto f = find_fault(m, &gamma, s)) return "faults from " + s.to_string() + " on " + to_string(*f);
  }
  return std::nullopt;
}

}  // namespace

FrameReport frame_check(const FrameInputs& in) {
  FrameReport r;
  const Spec& base = *in.base;
  const Spec& ext = *in.extended;

  if (!extends(ext, base)) fail(r.extends, "extended specification does not extend the base");

  // per initial state of L1, whether L1 : base is safe there
  std::vector<bool> l1_base_safe;
  {
    TraceMachine m(in.l1, nullptr, GenMode::library_local, in.bounds);
    for (const auto& s : in.i1) {
      auto f = find_fault(m, &base, s);
      l1_base_safe.push_back(!f);
      if (f) fail(r.safety, "first library faults under the base spec from " + s.to_string() + " on " + to_string(*f));
    }
  }
  const auto l2_fault = fault_of(*in.l2, base, in.i2, in.bounds);
  if (l2_fault) fail(r.safety, "second library under the base spec " + *l2_fault);
  bool ext_safe = true;
  for (const auto* lib : {in.l1, in.l2}) {
    if (auto f = fault_of(*lib, ext, star_all(lib == in.l1 ? in.i1 : in.i2, in.extra), in.bounds)) {
      fail(r.safety, std::string(lib == in.l1 ? "first" : "second") + " library under the extended spec " + *f);
      ext_safe = false;
    }
  }

  r.base_check = check_lin_code(*in.l1, base, in.i1, *in.l2, in.i2, in.bounds, in.alg);
  if (r.base_check->verdict != Verdict::holds_at_bounds) fail(r.base_lin, r.base_check->detail);

  // Every trace of L1 under the extended spec: the extra pieces come back
  // untouched, and the floor of the trace is a base-level run.
  using Key = std::tuple<std::size_t, std::size_t, History>;
  std::set<Key> records;
  std::set<History> needed;
  TraceMachine m1(in.l1, nullptr, GenMode::library_local, in.bounds);
  for (std::size_t i = 0; i < in.i1.size(); ++i) {
    for (std::size_t j = 0; j < in.extra.size(); ++j) {
      auto s = star(in.i1[i], in.extra[j]);
      if (!s) continue;
      explore_outcomes(m1, &ext, *s, [&](const Trace& tr, const std::vector<Outcome>& outs) {
        for (const auto& o : outs) {
          ++r.traces;
          Trace lam = annotate(tr, o.annots);
          History h = history(lam, in.alg);
          try {
            ExtraEval e = extra_eval(ceil_history(h, base), in.extra[j]);
            if (e.top()) {
              if (!r.witness) r.witness = ExtraWitness{in.i1[i], in.extra[j], lam, ceil_history(h, base), e.failed_at,
                                                       e.failure};
              fail(r.untouched, "extra state disturbed: " + e.failure);
              continue;
            }
            ++r.lemmas.cases;
            if (l1_base_safe[i] && !is_member(m1, &base, floor_trace(lam, base), in.i1[i])) {
              r.lemmas.fail("floor-membership", to_string(lam) + " from " + s->to_string(),
                            "floor in the base denotation", "absent");
            }
            if (!l2_fault && records.emplace(i, j, h).second) needed.insert(floor_history(h, base));
          } catch (const FrameViolation& v) {
            fail(r.untouched, v.what());
          }
        }
      });
    }
  }

  // Base-level runs of L2 realising the needed floor histories; skipped
  // when L2 faults, since the search stops at the fault.
  std::map<std::pair<std::size_t, History>, Trace> found;
  TraceMachine m2(in.l2, nullptr, GenMode::library_local, in.bounds);
  for (std::size_t k = 0; k < in.i2.size() && !needed.empty(); ++k) {
    explore_outcomes(m2, &base, in.i2[k], [&](const Trace& tr, const std::vector<Outcome>& outs) {
      for (const auto& o : outs) {
        Trace lam = annotate(tr, o.annots);
        History h = history(lam, in.alg);
        if (needed.count(h)) found.emplace(std::make_pair(k, std::move(h)), std::move(lam));
      }
    });
  }

  for (const auto& [i, j, h] : records) {
    History hf = floor_history(h, base);
    const Footprint f1 = delta(in.i1[i]);
    bool any = false;
    bool ok = false;
    std::string tried;
    for (std::size_t k = 0; k < in.i2.size() && !ok; ++k) {
      if (!foot_leq(delta(in.i2[k]), f1)) continue;
      auto s = star(in.i2[k], in.extra[j]);
      if (!s) continue;
      auto it = found.find({k, hf});
      if (it == found.end()) continue;
      any = true;
      Trace lam2 = annotate(ground(it->second), annotations(h));
      ok = is_member(m2, &ext, lam2, *s);
      if (!ok) tried = to_string(lam2) + " from " + s->to_string();
    }
    if (ok) {
      ++r.reconstructed;
    } else if (any) {
      r.lemmas.fail("reconstruction", tried, "member of the extended denotation", "absent");
    } else {
      ++r.unreached;
    }
  }

  if (ext_safe) {
    r.direct = check_lin_code(*in.l1, ext, star_all(in.i1, in.extra), *in.l2, star_all(in.i2, in.extra), in.bounds,
                              in.alg);
  }

  if (!r.hypotheses_ok()) {
    r.verdict = Verdict::hypothesis_failed;
    std::string d;
    const std::pair<const char*, const Hypothesis*> hs[] = {
        {"(1) extension", &r.extends}, {"(2) safety", &r.safety}, {"(3) base linearizability", &r.base_lin},
        {"(4) extra state untouched", &r.untouched}};
    for (const auto& [name, h] : hs) {
      if (!h->ok) d += std::string(d.empty() ? "" : "; ") + name + ": " + h->detail;
    }
    r.detail = d;
  } else if (!r.direct || r.direct->verdict != Verdict::holds_at_bounds) {
    r.verdict = Verdict::violated;
    r.detail = "conclusion contradicted by the direct check: " + (r.direct ? r.direct->detail : std::string("none"));
  } else if (!r.lemmas.passed()) {
    r.verdict = Verdict::violated;
    r.detail = "lemma check failed: " + r.lemmas.counterexamples.front().law;
  } else {
    r.detail = "linearizable under the extended spec at bounds; confirmed directly";
  }
  return r;
}

}  // namespace ownlin
