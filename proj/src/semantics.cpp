#include "ownlin/semantics.hpp"

#include <algorithm>
#include <map>

#include "ownlin/footprint.hpp"

namespace ownlin {

namespace {

const MethodSpec& spec_for(const Spec* spec, const MethodName& m) {
  if (!spec) throw std::invalid_argument("local evaluation needs a method specification");
  auto it = spec->find(m);
  if (it == spec->end()) throw std::invalid_argument("method " + m + " has no specification");
  return it->second;
}

// Local-mode interface actions move state across the boundary: the
// receiving side picks any compatible piece, the giving side carves the
// unique one.
ActionResult receive(const Predicate& p, const State& s) {
  std::vector<ActionOutcome> out;
  for (const auto& piece : p.states) {
    if (auto joined = star(s, piece)) out.push_back({std::move(*joined), piece});
  }
  return out;
}

ActionResult give_up(const Predicate& p, const State& s, bool keep) {
  auto piece = carve(s, p);
  if (!piece) return std::nullopt;
  State rest = keep ? s : *state_sub(s, *piece);
  return std::vector<ActionOutcome>{{std::move(rest), *piece}};
}

}  // namespace

ActionResult eval_action(GenMode mode, const Spec* spec, const Action& a, const State& s, const EvalOptions& opts) {
  if (a.kind == ActKind::cmd) {
    auto r = prim_step(a.prim, a.thread, s);
    if (!r) return std::nullopt;
    std::vector<ActionOutcome> out;
    for (const auto& x : *r) out.push_back({x, std::nullopt});
    return out;
  }
  if (mode == GenMode::complete) return std::vector<ActionOutcome>{{s, std::nullopt}};
  const MethodSpec& ms = spec_for(spec, a.method);
  const bool is_call = a.kind == ActKind::call;
  if (mode == GenMode::library_local) {
    if (is_call) return receive(ms.pre.at(a.thread), s);
    return give_up(ms.post.at(a.thread), s, opts.keep_returned);
  }
  if (is_call) return give_up(ms.pre.at(a.thread), s, false);
  return receive(ms.post.at(a.thread), s);
}

EvalResult eval_trace(GenMode mode, const Spec* spec, const Trace& tr, const State& s, const EvalOptions& opts) {
  std::set<std::pair<State, Trace>> cur{{s, Trace{}}};
  for (const auto& a : tr) {
    std::set<std::pair<State, Trace>> next;
    for (const auto& [st, done] : cur) {
      auto r = eval_action(mode, spec, a, st, opts);
      if (!r) return EvalResult{true, {}};
      for (auto& o : *r) {
        Trace ext = done;
        Action b = a;
        b.annot = o.annot;
        ext.push_back(std::move(b));
        next.insert({std::move(o.state), std::move(ext)});
      }
    }
    cur = std::move(next);
  }
  return EvalResult{false, std::move(cur)};
}

std::optional<std::set<State>> eval_annotated(GenMode mode, const Spec* spec, const Trace& tr, const State& s,
                                              const EvalOptions& opts) {
  std::set<State> cur{s};
  for (const auto& a : tr) {
    std::set<State> next;
    Action g = a;
    g.annot.reset();
    for (const auto& st : cur) {
      auto r = eval_action(mode, spec, g, st, opts);
      if (!r) return std::nullopt;
      for (auto& o : *r) {
        if (a.is_interface() && mode != GenMode::complete && !(o.annot == a.annot)) continue;
        next.insert(std::move(o.state));
      }
    }
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return cur;
}

Trace annotate(const Trace& ground_tr, const std::vector<State>& annots) {
  Trace out = ground_tr;
  std::size_t k = 0;
  for (auto& a : out) {
    if (a.is_interface() && k < annots.size()) a.annot = annots[k++];
  }
  return out;
}

std::optional<Trace> explore_outcomes(const TraceMachine& m, const Spec* spec, const State& s,
                                      const std::function<void(const Trace&, const std::vector<Outcome>&)>& visit,
                                      const EvalOptions& opts, const OutcomeFilter& keep) {
  std::optional<Trace> fault;
  std::vector<std::vector<Outcome>> stack;
  const GenMode mode = m.mode();
  m.explore([&](const Trace& tr) {
    if (fault) return false;
    const std::size_t n = tr.size();
    if (n == 0) {
      stack.assign(1, {Outcome{s, {}}});
      visit(tr, stack[0]);
      return true;
    }
    std::set<Outcome> next;
    for (const auto& o : stack[n - 1]) {
      auto r = eval_action(mode, spec, tr.back(), o.state, opts);
      if (!r) {
        fault = tr;
        return false;
      }
      for (auto& x : *r) {
        Outcome no{std::move(x.state), o.annots};
        if (x.annot) no.annots.push_back(std::move(*x.annot));
        if (keep && !keep(tr, no)) continue;
        next.insert(std::move(no));
      }
    }
    if (next.empty()) return false;
    stack.resize(n + 1);
    stack[n].assign(next.begin(), next.end());
    visit(tr, stack[n]);
    return true;
  });
  return fault;
}

std::optional<Trace> find_fault(const TraceMachine& m, const Spec* spec, const State& s, const EvalOptions& opts) {
  std::optional<Trace> fault;
  std::vector<std::vector<State>> stack;
  m.explore([&](const Trace& tr) {
    if (fault) return false;
    const std::size_t n = tr.size();
    if (n == 0) {
      stack.assign(1, {s});
      return true;
    }
    std::set<State> next;
    for (const auto& st : stack[n - 1]) {
      auto r = eval_action(m.mode(), spec, tr.back(), st, opts);
      if (!r) {
        fault = tr;
        return false;
      }
      for (auto& x : *r) next.insert(std::move(x.state));
    }
    if (next.empty()) return false;
    stack.resize(n + 1);
    stack[n].assign(next.begin(), next.end());
    return true;
  });
  return fault;
}

Denotation eval_program(const TraceMachine& m, const Spec* spec, const State& s, const EvalOptions& opts) {
  Denotation d;
  auto fault = explore_outcomes(
      m, spec, s,
      [&](const Trace& tr, const std::vector<Outcome>& outs) {
        for (const auto& o : outs) d.traces.insert(annotate(tr, o.annots));
      },
      opts);
  if (fault) {
    d.faulted = true;
    d.fault_trace = std::move(*fault);
    d.traces.clear();
  }
  return d;
}

Denotation eval_program_unfused(const TraceMachine& m, const Spec* spec, const State& s, const EvalOptions& opts) {
  Denotation d;
  for (const auto& tr : m.trace_set()) {
    auto r = eval_trace(m.mode(), spec, tr, s, opts);
    if (r.faulted) {
      d.faulted = true;
      d.fault_trace = tr;
      d.traces.clear();
      return d;
    }
    for (auto& [st, ann] : r.outcomes) d.traces.insert(ann);
  }
  return d;
}

bool is_member(const TraceMachine& m, const Spec* spec, const Trace& annotated, const State& s) {
  if (!m.accepts(ground(annotated))) return false;
  auto r = eval_annotated(m.mode(), spec, annotated, s);
  return r && !r->empty();
}

InterfaceSet interf(const Library& lib, const Spec& spec, const std::vector<State>& init, const Bounds& bounds,
                    AlgebraId alg, const EvalOptions& opts) {
  TraceMachine m(&lib, nullptr, GenMode::library_local, bounds);
  InterfaceSet out;
  for (const auto& s0 : init) {
    Footprint l0 = delta(s0);
    auto fault = explore_outcomes(
        m, &spec, s0,
        [&](const Trace& tr, const std::vector<Outcome>& outs) {
          for (const auto& o : outs) {
            History h = history(annotate(tr, o.annots), alg);
            if (!opts.keep_returned && !is_balanced(h, l0)) {
              throw std::logic_error("library-local history not balanced: " + to_string(h));
            }
            out.insert(BalancedHistory{l0, std::move(h)});
          }
        },
        opts);
    if (fault) throw UnsafeError("library faults from " + s0.to_string() + " on " + to_string(*fault), s0, *fault);
  }
  return out;
}

Bounds library_side_bounds(const Bounds& b, int client_threads) {
  Bounds out = b;
  out.mgc_threads = client_threads;
  out.mgc_iterations = static_cast<int>((b.max_trace + 1) / 2);
  return out;
}

namespace {

struct Split {
  std::vector<Trace> segments;  // one more than interface actions
  Trace iface;
};

Split split(const Trace& tr) {
  Split s;
  s.segments.emplace_back();
  for (const auto& a : tr) {
    if (a.is_interface()) {
      s.iface.push_back(a);
      s.segments.emplace_back();
    } else {
      s.segments.back().push_back(a);
    }
  }
  return s;
}

void shuffles(const Trace& a, const Trace& b, std::size_t i, std::size_t j, Trace& cur, std::vector<Trace>& out) {
  if (i == a.size() && j == b.size()) {
    out.push_back(cur);
    return;
  }
  if (i < a.size()) {
    cur.push_back(a[i]);
    shuffles(a, b, i + 1, j, cur, out);
    cur.pop_back();
  }
  if (j < b.size()) {
    cur.push_back(b[j]);
    shuffles(a, b, i, j + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Trace> covers(const Trace& kappa, const Trace& lambda, std::size_t max_len) {
  if (interface_part(kappa) != interface_part(lambda)) return {};
  Trace k = ground(kappa), l = ground(lambda);
  Split sk = split(k), sl = split(l);
  if (sk.iface != sl.iface) return {};
  if (k.size() + l.size() - sk.iface.size() > max_len) return {};
  std::vector<Trace> acc{Trace{}};
  for (std::size_t seg = 0; seg < sk.segments.size(); ++seg) {
    std::vector<Trace> parts;
    Trace cur;
    shuffles(sk.segments[seg], sl.segments[seg], 0, 0, cur, parts);
    std::vector<Trace> next;
    for (const auto& prefix : acc) {
      for (const auto& p : parts) {
        Trace t = prefix;
        t.insert(t.end(), p.begin(), p.end());
        if (seg < sk.iface.size()) t.push_back(sk.iface[seg]);
        next.push_back(std::move(t));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

Trace canonical_cover(const Trace& kappa, const Trace& lambda) {
  Split sk = split(ground(kappa)), sl = split(ground(lambda));
  if (interface_part(kappa) != interface_part(lambda)) throw std::invalid_argument("canonical_cover: histories differ");
  Trace out;
  for (std::size_t seg = 0; seg < sk.segments.size(); ++seg) {
    out.insert(out.end(), sk.segments[seg].begin(), sk.segments[seg].end());
    out.insert(out.end(), sl.segments[seg].begin(), sl.segments[seg].end());
    if (seg < sk.iface.size()) out.push_back(sk.iface[seg]);
  }
  return out;
}

bool is_cover(const Trace& tau, const Trace& kappa, const Trace& lambda) {
  return interface_part(kappa) == interface_part(lambda) && client_proj(tau) == ground(kappa) &&
         lib_proj(tau) == ground(lambda);
}

namespace {

using Pairs = std::set<std::pair<State, Trace>>;

std::string show_pair(const std::pair<State, Trace>& p) { return p.first.to_string() + " / " + to_string(p.second); }

}  // namespace

DecomposeReport compose_decompose_check(const ClientProgram& client, const Library& lib, const Spec& spec,
                                        const std::vector<State>& i0, const std::vector<State>& i1,
                                        const Bounds& bounds, const EvalOptions& lib_opts) {
  DecomposeReport rep;
  const int n = static_cast<int>(client.threads.size());

  TraceMachine cm(nullptr, &client, GenMode::client_local, bounds);
  TraceMachine lm(&lib, nullptr, GenMode::library_local, library_side_bounds(bounds, n));
  TraceMachine full(&lib, &client, GenMode::complete, bounds);

  Pairs x, y;
  for (const auto& s : i0) {
    auto d = eval_program(cm, &spec, s);
    if (d.faulted) {
      rep.hypotheses_ok = false;
      rep.hypothesis_failure = "client unsafe at " + s.to_string() + ": " + to_string(d.fault_trace);
      return rep;
    }
    for (auto& k : d.traces) x.insert({s, k});
  }
  // Only library runs whose history some client run shares can pair up, so
  // the library side is explored up to prefixes of the client histories.
  // Safety is checked on the unrestricted run first.
  std::set<Trace> client_prefixes;
  for (const auto& [s, k] : x) {
    Trace h = interface_part(k);
    for (std::size_t i = 0; i <= h.size(); ++i) client_prefixes.insert(Trace(h.begin(), h.begin() + i));
  }
  auto keep = [&](const Trace& tr, const Outcome& o) {
    return client_prefixes.count(annotate(interface_part(tr), o.annots)) > 0;
  };
  for (const auto& s : i1) {
    auto fault = find_fault(lm, &spec, s, lib_opts);
    if (fault) {
      rep.hypotheses_ok = false;
      rep.hypothesis_failure = "library unsafe at " + s.to_string() + ": " + to_string(*fault);
      return rep;
    }
    explore_outcomes(
        lm, &spec, s,
        [&](const Trace& tr, const std::vector<Outcome>& outs) {
          for (const auto& o : outs) y.insert({s, annotate(tr, o.annots)});
        },
        lib_opts, keep);
  }

  Pairs left;
  std::set<State> joined_init;
  for (const auto& a : i0)
    for (const auto& b : i1)
      if (auto s = star(a, b)) joined_init.insert(*s);
  for (const auto& s : joined_init) {
    auto d = eval_program(full, nullptr, s);
    if (d.faulted) {
      rep.laws.fail("safety", s.to_string(), "safe", "fault on " + to_string(d.fault_trace));
      continue;
    }
    for (auto& t : d.traces) left.insert({s, t});
  }

  std::map<Trace, std::vector<const std::pair<State, Trace>*>> y_by_history;
  for (const auto& p : y) y_by_history[interface_part(p.second)].push_back(&p);

  Pairs right;
  for (const auto& [s0, kappa] : x) {
    auto it = y_by_history.find(interface_part(kappa));
    if (it == y_by_history.end()) continue;
    for (const auto* lp : it->second) {
      auto s = star(s0, lp->first);
      if (!s) continue;
      ++rep.laws.cases;
      for (auto& t : covers(kappa, lp->second, bounds.max_trace)) right.insert({*s, std::move(t)});
      // Composition direction: the canonical merge must be a complete run.
      Trace canon = canonical_cover(kappa, lp->second);
      if (canon.size() <= bounds.max_trace && !left.count({*s, canon})) {
        rep.laws.fail("composition", show_pair({*s, canon}), "in complete denotation", "missing");
      }
    }
  }
  rep.left_size = left.size();
  rep.right_size = right.size();

  for (const auto& p : left) {
    if (!right.count(p)) rep.laws.fail("equality", show_pair(p), "in combined local denotations", "missing");
  }
  for (const auto& p : right) {
    if (!left.count(p)) rep.laws.fail("equality", show_pair(p), "in complete denotation", "missing");
  }

  // Decomposition direction, checked independently of the merge above.
  std::map<Trace, std::vector<const std::pair<State, Trace>*>> x_by_ground, y_by_ground;
  for (const auto& p : x) x_by_ground[ground(p.second)].push_back(&p);
  for (const auto& p : y) y_by_ground[ground(p.second)].push_back(&p);
  for (const auto& p : left) {
    ++rep.laws.cases;
    bool found = false;
    auto xi = x_by_ground.find(client_proj(p.second));
    auto yi = y_by_ground.find(lib_proj(p.second));
    if (xi != x_by_ground.end() && yi != y_by_ground.end()) {
      for (const auto* kp : xi->second) {
        for (const auto* lp : yi->second) {
          auto s = star(kp->first, lp->first);
          if (s && *s == p.first && is_cover(p.second, kp->second, lp->second)) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
    }
    if (!found) rep.laws.fail("decomposition", show_pair(p), "split into local runs", "none");
  }
  return rep;
}

}  // namespace ownlin
