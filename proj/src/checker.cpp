#include "ownlin/checker.hpp"

#include <map>

#include "ownlin/footprint.hpp"
#include "ownlin/rearrange.hpp"

namespace ownlin {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_at_bounds: return "HOLDS-AT-BOUNDS";
    case Verdict::violated: return "VIOLATED";
    case Verdict::hypothesis_failed: return "HYPOTHESIS-FAILED";
  }
  return "?";
}

int exit_code(Verdict v) { return static_cast<int>(v); }

namespace {

std::optional<InterfaceSet> safe_interf(const Library& lib, const Spec& gamma, const std::vector<State>& init,
                                        const Bounds& b, AlgebraId alg, const char* which, LinCheck& out) {
  try {
    return interf(lib, gamma, init, b, alg);
  } catch (const UnsafeError& e) {
    out.verdict = Verdict::hypothesis_failed;
    out.detail = std::string(which) + " unsafe: " + e.what();
    return std::nullopt;
  }
}

void decide(const InterfaceSet& a, const InterfaceSet& b, bool keep_entries, LinCheck& out) {
  out.left_size = a.size();
  out.right_size = b.size();
  out.leq = interface_set_leq(a, b, keep_entries);
  out.inclusion = interface_set_included(a, b);
  if (out.leq.holds) {
    out.verdict = Verdict::holds_at_bounds;
    out.detail = "every history is linearized";
  } else {
    out.verdict = Verdict::violated;
    out.detail = "not linearized: " + to_string(out.leq.failing->history) + " from " +
                 out.leq.failing->initial.to_string();
  }
}

}  // namespace

LinCheck check_lin_code(const Library& l1, const Spec& gamma, const std::vector<State>& i1, const Library& l2,
                        const std::vector<State>& i2, const Bounds& bounds, AlgebraId alg, bool keep_entries) {
  LinCheck out;
  auto a = safe_interf(l1, gamma, i1, bounds, alg, "first library", out);
  if (!a) return out;
  auto b = safe_interf(l2, gamma, i2, bounds, alg, "second library", out);
  if (!b) return out;
  decide(*a, *b, keep_entries, out);
  return out;
}

LinCheck check_lin_interfaceset(const Library& l1, const Spec& gamma, const std::vector<State>& i1,
                                const InterfaceSet& h2, const Bounds& bounds, AlgebraId alg, bool keep_entries) {
  LinCheck out;
  auto a = safe_interf(l1, gamma, i1, bounds, alg, "library", out);
  if (!a) return out;
  decide(*a, h2, keep_entries, out);
  return out;
}

InterfaceSet sequential_part(const InterfaceSet& is) {
  InterfaceSet out;
  for (const auto& e : is) {
    const History& h = e.history;
    std::size_t cut = h.size();
    while (cut > 0 && h[cut - 1].is_call()) --cut;
    // calls left pending must not return later in the history
    if (is_sequential(History(h.begin(), h.begin() + static_cast<long>(cut)))) out.insert(e);
  }
  return out;
}

namespace {

struct Run {
  State client_state;
  State init;
  Trace trace;
};

// Complete-program runs of C(L) from every compatible pair of initial
// states; empty with a message when some run faults.
std::optional<std::vector<Run>> complete_runs(const AbstractionInputs& in, const Library& lib,
                                              const std::vector<State>& lib_init, std::string& why) {
  TraceMachine m(&lib, in.client, GenMode::complete, in.bounds);
  std::vector<Run> out;
  for (const auto& c : in.client_init) {
    for (const auto& l : lib_init) {
      auto s = star(c, l);
      if (!s) continue;
      auto d = eval_program(m, nullptr, *s);
      if (d.faulted) {
        why = "complete program faults from " + s->to_string() + ": " + to_string(d.fault_trace);
        return std::nullopt;
      }
      for (auto& t : d.traces) out.push_back({c, *s, t});
    }
  }
  return out;
}

bool hypotheses(const AbstractionInputs& in, const Library& l2, const std::vector<State>& i2, AbstractionCheck& out) {
  TraceMachine cm(nullptr, in.client, GenMode::client_local, in.bounds);
  for (const auto& c : in.client_init) {
    if (auto f = find_fault(cm, in.gamma, c)) {
      out.verdict = Verdict::hypothesis_failed;
      out.detail = "client unsafe from " + c.to_string() + ": " + to_string(*f);
      return false;
    }
  }
  const int n = static_cast<int>(in.client->threads.size());
  Bounds lb = library_side_bounds(in.bounds, n);
  for (const auto* lib : {in.l1, &l2}) {
    TraceMachine lm(lib, nullptr, GenMode::library_local, lb);
    for (const auto& s : lib == in.l1 ? in.i1 : i2) {
      if (auto f = find_fault(lm, in.gamma, s)) {
        out.verdict = Verdict::hypothesis_failed;
        out.detail = std::string(lib == in.l1 ? "concrete" : "abstract") + " library unsafe from " + s.to_string() +
                     ": " + to_string(*f);
        return false;
      }
    }
  }
  return true;
}

}  // namespace

AbstractionCheck abstraction_check_code(const AbstractionInputs& in, const Library& l2, const std::vector<State>& i2,
                                        bool assume_lin) {
  AbstractionCheck out;
  if (!hypotheses(in, l2, i2, out)) return out;
  if (!assume_lin) {
    out.lin = check_lin_code(*in.l1, *in.gamma, in.i1, l2, i2, in.bounds, in.alg);
    if (out.lin->verdict != Verdict::holds_at_bounds) {
      out.verdict = Verdict::hypothesis_failed;
      out.detail = "linearizability: " + out.lin->detail;
      return out;
    }
  }
  std::string why;
  auto concrete = complete_runs(in, *in.l1, in.i1, why);
  auto abstract = concrete ? complete_runs(in, l2, i2, why) : std::nullopt;
  if (!concrete || !abstract) {
    out.verdict = Verdict::hypothesis_failed;
    out.detail = why;
    return out;
  }
  out.concrete_outcomes = concrete->size();
  out.abstract_outcomes = abstract->size();
  std::set<std::pair<State, Trace>> seen;
  for (const auto& r : *abstract) seen.insert({r.client_state, client_proj(r.trace)});
  for (const auto& r : *concrete) {
    if (!seen.count({r.client_state, client_proj(r.trace)})) {
      out.verdict = Verdict::violated;
      out.detail = "client behaviour not reproduced: " + to_string(client_proj(r.trace)) + " from " +
                   r.init.to_string();
      out.counterexample = std::make_pair(r.init, r.trace);
      return out;
    }
  }
  out.detail = "every client projection reproduced";
  return out;
}

AbstractionCheck abstraction_check_spec(const AbstractionInputs& in, const InterfaceSet& h2, bool assume_lin) {
  AbstractionCheck out;
  if (!hypotheses(in, *in.l1, in.i1, out)) return out;
  if (!assume_lin) {
    out.lin = check_lin_interfaceset(*in.l1, *in.gamma, in.i1, h2, in.bounds, in.alg);
    if (out.lin->verdict != Verdict::holds_at_bounds) {
      out.verdict = Verdict::hypothesis_failed;
      out.detail = "linearizability: " + out.lin->detail;
      return out;
    }
  }
  std::string why;
  auto concrete = complete_runs(in, *in.l1, in.i1, why);
  if (!concrete) {
    out.verdict = Verdict::hypothesis_failed;
    out.detail = why;
    return out;
  }
  out.concrete_outcomes = concrete->size();

  std::map<History, std::vector<Footprint>> allowed;
  for (const auto& e : h2) allowed[e.history].push_back(e.initial);

  // client-local runs with an allowed history, indexed by command projection
  TraceMachine cm(nullptr, in.client, GenMode::client_local, in.bounds);
  std::map<std::pair<State, Trace>, std::vector<Trace>> runs;
  for (const auto& c : in.client_init) {
    const Footprint fc = delta(c);
    auto d = eval_program(cm, in.gamma, c);
    for (const auto& k : d.traces) {
      auto it = allowed.find(history(k, in.alg));
      if (it == allowed.end()) continue;
      bool fits = false;
      for (const auto& l : it->second) fits = fits || foot_add(fc, l).has_value();
      if (!fits) continue;
      runs[{c, command_proj(k)}].push_back(ground(k));
      ++out.abstract_outcomes;
    }
  }
  for (const auto& r : *concrete) {
    Trace ct = client_proj(r.trace);
    auto it = runs.find({r.client_state, command_proj(ct)});
    bool found = it != runs.end() &&
                 std::any_of(it->second.begin(), it->second.end(), [&](const Trace& k) { return equivalent(ct, k); });
    if (!found) {
      out.verdict = Verdict::violated;
      out.detail = "no equivalent client run with an allowed history: " + to_string(ct) + " from " +
                   r.init.to_string();
      out.counterexample = std::make_pair(r.init, r.trace);
      return out;
    }
  }
  out.detail = "every client projection has an equivalent run with an allowed history";
  return out;
}

}  // namespace ownlin
