#include "ownlin/rearrange.hpp"

#include <algorithm>

#include "ownlin/footprint.hpp"

namespace ownlin {

std::string to_string(SwapKind k) {
  switch (k) {
    case SwapKind::non_ret_before_call: return "non-ret-before-call";
    case SwapKind::ret_before_call_balanced: return "ret-before-call-balanced";
    case SwapKind::ret_before_non_call: return "ret-before-non-call";
  }
  return "?";
}

namespace {

Trace swapped(const Trace& z, std::size_t i) {
  Trace out = z;
  std::swap(out[i], out[i + 1]);
  return out;
}

bool is_call(const Action& a) { return a.kind == ActKind::call; }
bool is_ret(const Action& a) { return a.kind == ActKind::ret; }

}  // namespace

std::optional<SwapResult> try_swap(const TraceMachine& m, const Spec& spec, const State& s0, const Trace& z,
                                   std::size_t i) {
  if (i + 1 >= z.size()) return std::nullopt;
  const Action& a = z[i];
  const Action& b = z[i + 1];
  if (a.thread == b.thread) return std::nullopt;
  SwapKind kind;
  Trace out = swapped(z, i);
  if (!is_ret(a) && is_call(b)) {
    kind = SwapKind::non_ret_before_call;
  } else if (is_ret(a) && is_call(b)) {
    if (!is_balanced(history(out, s0.algebra()), delta(s0))) return std::nullopt;
    kind = SwapKind::ret_before_call_balanced;
  } else if (is_ret(a)) {
    kind = SwapKind::ret_before_non_call;
  } else {
    return std::nullopt;
  }
  if (!is_member(m, &spec, out, s0)) return std::nullopt;
  return SwapResult{std::move(out), kind};
}

std::optional<SwapResult> try_client_swap(const TraceMachine& m, const Spec& spec, const State& s, const Trace& k,
                                          std::size_t i, const Footprint& lib_foot) {
  if (i + 1 >= k.size()) return std::nullopt;
  const Action& a = k[i];
  const Action& b = k[i + 1];
  if (a.thread == b.thread) return std::nullopt;
  SwapKind kind;
  Trace out = swapped(k, i);
  // Same rules with calls and returns exchanged; the kind names the
  // library-side rule it mirrors.
  if (!is_call(a) && is_ret(b)) {
    kind = SwapKind::non_ret_before_call;
  } else if (is_call(a) && is_ret(b)) {
    if (!is_balanced(history(out, s.algebra()), lib_foot)) return std::nullopt;
    kind = SwapKind::ret_before_call_balanced;
  } else if (is_call(a)) {
    kind = SwapKind::ret_before_non_call;
  } else {
    return std::nullopt;
  }
  if (!is_member(m, &spec, out, s)) return std::nullopt;
  return SwapResult{std::move(out), kind};
}

namespace {

// Shared stage loop. `forward` is the kind of target action that is pulled
// left to the aligned prefix; the other kind pushes its blockers right.
struct Stager {
  const TraceMachine& m;
  const Spec& spec;
  const State& s;
  bool library;
  Footprint gate_foot;

  Trace cur;
  std::vector<long> tag;  // original history index, -1 for commands
  RearrangeLog log;

  std::optional<SwapResult> swap_at(std::size_t i) const {
    return library ? try_swap(m, spec, s, cur, i) : try_client_swap(m, spec, s, cur, i, gate_foot);
  }

  void apply(std::size_t i, const SwapResult& r) {
    cur = r.trace;
    std::swap(tag[i], tag[i + 1]);
    log.swaps.emplace_back(i, r.kind);
  }

  std::size_t pos_of(long t) const {
    auto it = std::find(tag.begin(), tag.end(), t);
    if (it == tag.end()) throw RearrangeAssertion("lost interface action", cur);
    return static_cast<std::size_t>(it - tag.begin());
  }

  // Bubble the action at p leftwards until no interface action of [b, p)
  // precedes it. Returns its final position.
  std::size_t pull_left(std::size_t p, std::size_t b) {
    std::size_t dest = p;
    for (std::size_t q = b; q < p; ++q)
      if (cur[q].is_interface()) {
        dest = q;
        break;
      }
    while (p > dest) {
      auto r = swap_at(p - 1);
      if (!r) {
        const Action& blocker = cur[p - 1];
        bool delicate = library ? is_ret(blocker) : is_call(blocker);
        throw RearrangeAssertion(delicate ? "conflicting return/call pair at position " + std::to_string(p - 1)
                                          : "no swap rule applies at position " + std::to_string(p - 1),
                                 cur);
      }
      apply(p - 1, *r);
      --p;
    }
    return p;
  }

  // Move every `blocker_kind` action of [b, p) to just after the action
  // tagged `psi`, keeping their order.
  void push_right(std::size_t b, long psi, ActKind blocker_kind) {
    std::vector<long> movers;
    for (std::size_t q = b; q < pos_of(psi); ++q)
      if (cur[q].kind == blocker_kind) movers.push_back(tag[q]);
    std::size_t moved = 0;
    for (long mv : movers) {
      for (;;) {
        std::size_t q = pos_of(mv);
        if (q == pos_of(psi) + moved + 1) break;
        auto r = swap_at(q);
        if (!r) throw RearrangeAssertion("cannot delay action at position " + std::to_string(q), cur);
        apply(q, *r);
      }
      ++moved;
    }
  }

  void check_prefix(const History& target, std::size_t k, std::size_t b) const {
    History h = history(Trace(cur.begin(), cur.begin() + static_cast<long>(b)), s.algebra());
    if (h != History(target.begin(), target.begin() + static_cast<long>(k + 1)))
      throw RearrangeAssertion("aligned prefix does not match the target", cur);
  }
};

std::vector<long> initial_tags(const Trace& tr) {
  std::vector<long> tags(tr.size(), -1);
  long n = 0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr[i].is_interface()) tags[i] = n++;
  return tags;
}

}  // namespace

RearrangeResult rearrange(const TraceMachine& m, const Spec& spec, const State& s0, const Trace& lambda2,
                          const History& target, const Footprint& target_foot) {
  if (m.mode() != GenMode::library_local) throw RearrangeInputError("rearrange needs a library-local machine");
  const AlgebraId alg = s0.algebra();
  const Footprint l0 = delta(s0);
  const History h2 = history(lambda2, alg);
  if (!is_member(m, &spec, lambda2, s0)) throw RearrangeInputError("trace is not in the library-local denotation");
  if (!is_balanced(target, target_foot)) throw RearrangeInputError("target history is not balanced from its footprint");
  if (!balanced_linearized_by({target_foot, target}, {l0, h2}))
    throw RearrangeInputError("target is not linearized by the trace's history");
  auto rho = linearized_by(target, h2);
  if (!rho) throw RearrangeInputError("no linearization witness");

  Stager st{m, spec, s0, true, l0, lambda2, initial_tags(lambda2), {}};
  std::size_t b = 0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const long psi = static_cast<long>((*rho)[k]);
    std::size_t p = st.pos_of(psi);
    if (p < b) throw RearrangeAssertion("matched action inside the aligned prefix", st.cur);
    const std::size_t before = st.log.swaps.size();
    if (target[k].is_call()) {
      b = st.pull_left(p, b) + 1;
      History with(target.begin(), target.begin() + static_cast<long>(k + 1));
      History without(target.begin(), target.begin() + static_cast<long>(k));
      if (extra_calls_identity(with, without, target_foot, l0) != true)
        throw RearrangeAssertion("footprint bookkeeping for the extra call fails", st.cur);
    } else {
      for (std::size_t q = b; q < p; ++q)
        if (is_call(st.cur[q])) throw RearrangeAssertion("call between the prefix and a matched return", st.cur);
      st.push_right(b, psi, ActKind::ret);
      b = st.pos_of(psi) + 1;
    }
    st.check_prefix(target, k, b);
    st.log.stages.push_back({k, target[k].is_call(), b, st.log.swaps.size() - before});
  }
  if (history(st.cur, alg) != target) throw RearrangeAssertion("result history differs from the target", st.cur);
  return {std::move(st.cur), std::move(st.log)};
}

RearrangeResult client_rearrange(const TraceMachine& m, const Spec& spec, const State& s, const Trace& kappa,
                                 const History& target, const Footprint& lib_foot, const Footprint& target_foot) {
  if (m.mode() != GenMode::client_local) throw RearrangeInputError("client_rearrange needs a client-local machine");
  const AlgebraId alg = s.algebra();
  const History h = history(kappa, alg);
  if (!is_member(m, &spec, kappa, s)) throw RearrangeInputError("trace is not in the client-local denotation");
  if (!foot_add(delta(s), lib_foot)) throw RearrangeInputError("client state does not compose with the library footprint");
  if (!is_balanced(h, lib_foot)) throw RearrangeInputError("trace history is not balanced from the library footprint");
  if (!balanced_linearized_by({lib_foot, h}, {target_foot, target}))
    throw RearrangeInputError("trace history is not linearized by the target");
  auto rho = linearized_by(h, target);
  if (!rho) throw RearrangeInputError("no linearization witness");
  std::vector<long> inv(target.size());
  for (std::size_t i = 0; i < rho->size(); ++i) inv[(*rho)[i]] = static_cast<long>(i);

  Stager st{m, spec, s, false, lib_foot, kappa, initial_tags(kappa), {}};
  std::size_t b = 0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const long psi = inv[k];
    std::size_t p = st.pos_of(psi);
    if (p < b) throw RearrangeAssertion("matched action inside the aligned prefix", st.cur);
    const std::size_t before = st.log.swaps.size();
    if (target[k].is_ret()) {
      b = st.pull_left(p, b) + 1;
    } else {
      for (std::size_t q = b; q < p; ++q)
        if (is_ret(st.cur[q])) throw RearrangeAssertion("return between the prefix and a matched call", st.cur);
      st.push_right(b, psi, ActKind::call);
      b = st.pos_of(psi) + 1;
    }
    st.check_prefix(target, k, b);
    st.log.stages.push_back({k, target[k].is_call(), b, st.log.swaps.size() - before});
  }
  if (history(st.cur, alg) != target) throw RearrangeAssertion("result history differs from the target", st.cur);
  if (!equivalent(kappa, st.cur)) throw RearrangeAssertion("result is not equivalent to the input", st.cur);
  return {std::move(st.cur), std::move(st.log)};
}

bool equivalent(const Trace& a, const Trace& b) {
  if (a.size() != b.size() || command_proj(a) != command_proj(b)) return false;
  std::set<ThreadId> ts;
  for (const auto& x : a) ts.insert(x.thread);
  for (const auto& x : b) ts.insert(x.thread);
  return std::all_of(ts.begin(), ts.end(), [&](ThreadId t) { return thread_proj(a, t) == thread_proj(b, t); });
}

std::optional<bool> extra_calls_identity(const History& s, const History& s2, const Footprint& l1,
                                         const Footprint& l2) {
  if (!foot_leq(l2, l1)) return std::nullopt;
  auto e1 = evaluate_footprint(s, l1);
  auto e2 = evaluate_footprint(s2, l2);
  if (!e1 || !e2) return std::nullopt;
  // s2 must be s with some calls removed
  Footprint lc(l1.algebra());
  std::size_t j = 0;
  for (const auto& a : s) {
    if (j < s2.size() && a == s2[j]) {
      ++j;
      continue;
    }
    if (!a.is_call()) return std::nullopt;
    auto next = foot_add(lc, delta(a.state));
    if (!next) return false;
    lc = *next;
  }
  if (j != s2.size()) return std::nullopt;
  auto e21 = evaluate_footprint(s2, l1);
  if (!e21) return false;
  auto combined = foot_add(*e21, lc);
  return combined && *combined == *e1 && foot_leq(*e2, *e21);
}

}  // namespace ownlin
