#include "ownlin/history.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ownlin {

std::string InterfaceAction::to_string() const {
  std::ostringstream os;
  os << '(' << thread << ", " << (is_call() ? "call " : "ret ") << method << ' ' << state.to_string() << ')';
  return os.str();
}

std::string to_string(const History& h) {
  std::string out = "[";
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ", ";
    out += h[i].to_string();
  }
  return out + "]";
}

bool check_well_formed(const History& h) {
  std::map<ThreadId, const MethodName*> pending;
  for (const auto& a : h) {
    auto it = pending.find(a.thread);
    bool open = it != pending.end() && it->second != nullptr;
    if (a.is_call()) {
      if (open) return false;
      pending[a.thread] = &a.method;
    } else {
      if (!open || *it->second != a.method) return false;
      it->second = nullptr;
    }
  }
  return true;
}

bool is_sequential(const History& h) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!h[i].is_call()) continue;
    if (i + 1 == h.size()) return false;
    const auto& r = h[i + 1];
    if (!r.is_ret() || r.thread != h[i].thread || r.method != h[i].method) return false;
  }
  return true;
}

History project_thread(const History& h, ThreadId t) {
  History out;
  std::copy_if(h.begin(), h.end(), std::back_inserter(out), [t](const auto& a) { return a.thread == t; });
  return out;
}

std::set<ThreadId> threads_of(const History& h) {
  std::set<ThreadId> out;
  for (const auto& a : h) out.insert(a.thread);
  return out;
}

std::optional<Footprint> evaluate_footprint(const History& h, const Footprint& l) {
  std::optional<Footprint> cur = l;
  for (const auto& a : h) {
    Footprint d = delta(a.state);
    cur = a.is_call() ? foot_add(*cur, d) : foot_sub(*cur, d);
    if (!cur) return std::nullopt;
  }
  return cur;
}

bool is_balanced(const History& h, const Footprint& l) { return evaluate_footprint(h, l).has_value(); }

namespace {

struct LinSearch {
  const History& h;
  const History& h2;
  LinWitness rho;
  std::vector<bool> used;
  std::map<ThreadId, long> last_of_thread;

  bool run(std::size_t i, long max_ret) {
    if (i == h.size()) return true;
    const auto& a = h[i];
    long floor = std::max(a.is_call() ? max_ret : -1L, last_of_thread.count(a.thread) ? last_of_thread[a.thread] : -1L);
    for (std::size_t j = static_cast<std::size_t>(floor + 1); j < h2.size(); ++j) {
      if (used[j] || !(h2[j] == a)) continue;
      used[j] = true;
      rho[i] = j;
      long saved = last_of_thread.count(a.thread) ? last_of_thread[a.thread] : -1L;
      last_of_thread[a.thread] = static_cast<long>(j);
      long next_ret = a.is_ret() ? std::max(max_ret, static_cast<long>(j)) : max_ret;
      if (run(i + 1, next_ret)) return true;
      last_of_thread[a.thread] = saved;
      used[j] = false;
    }
    return false;
  }
};

}  // namespace

std::optional<LinWitness> linearized_by(const History& h, const History& h2) {
  if (h.size() != h2.size()) return std::nullopt;
  LinSearch s{h, h2, LinWitness(h.size()), std::vector<bool>(h2.size()), {}};
  if (!s.run(0, -1)) return std::nullopt;
  return s.rho;
}

bool is_lin_witness(const History& h, const History& h2, const LinWitness& rho) {
  if (h.size() != h2.size() || rho.size() != h.size()) return false;
  std::vector<bool> seen(h2.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (rho[i] >= h2.size() || seen[rho[i]] || !(h[i] == h2[rho[i]])) return false;
    seen[rho[i]] = true;
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      bool ordered = h[i].thread == h[j].thread || (h[i].is_ret() && h[j].is_call());
      if (ordered && rho[i] > rho[j]) return false;
    }
  }
  return true;
}

bool linearized_by_bruteforce(const History& h, const History& h2) {
  if (h.size() != h2.size()) return false;
  // Group indices by action; a label-preserving bijection permutes within
  // each group.
  std::map<InterfaceAction, std::vector<std::size_t>> left, right;
  for (std::size_t i = 0; i < h.size(); ++i) left[h[i]].push_back(i);
  for (std::size_t j = 0; j < h2.size(); ++j) right[h2[j]].push_back(j);
  if (left.size() != right.size()) return false;
  std::vector<std::pair<const std::vector<std::size_t>*, std::vector<std::size_t>>> groups;
  for (auto& [act, idx] : left) {
    auto it = right.find(act);
    if (it == right.end() || it->second.size() != idx.size()) return false;
    groups.push_back({&idx, it->second});
  }
  LinWitness rho(h.size());
  // Odometer over the per-group permutations.
  for (auto& g : groups) std::sort(g.second.begin(), g.second.end());
  while (true) {
    for (auto& [from, to] : groups) {
      for (std::size_t k = 0; k < from->size(); ++k) rho[(*from)[k]] = to[k];
    }
    if (is_lin_witness(h, h2, rho)) return true;
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (std::next_permutation(groups[g].second.begin(), groups[g].second.end())) break;
    }
    if (g == groups.size()) return false;
  }
}

bool balanced_linearized_by(const BalancedHistory& b1, const BalancedHistory& b2) {
  return foot_leq(b2.initial, b1.initial) && linearized_by(b1.history, b2.history).has_value();
}

namespace {

// h is linearized by h2 only if their per-thread projections agree, so the
// right-hand set is bucketed by that key.
using ThreadKey = std::vector<History>;

ThreadKey thread_key(const History& h) {
  std::map<ThreadId, History> by;
  for (const auto& a : h) by[a.thread].push_back(a);
  ThreadKey key;
  for (auto& [t, sub] : by) key.push_back(std::move(sub));
  return key;
}

}  // namespace

LeqReport interface_set_leq(const InterfaceSet& a, const InterfaceSet& b, bool keep_entries) {
  std::map<ThreadKey, std::vector<const BalancedHistory*>> buckets;
  for (const auto& e : b) buckets[thread_key(e.history)].push_back(&e);
  LeqReport report;
  for (const auto& e : a) {
    LeqEntry row{e, std::nullopt, {}};
    auto it = buckets.find(thread_key(e.history));
    if (it != buckets.end()) {
      for (const auto* cand : it->second) {
        if (!foot_leq(cand->initial, e.initial)) continue;
        if (auto w = linearized_by(e.history, cand->history)) {
          row.matched = *cand;
          row.witness = std::move(*w);
          break;
        }
      }
    }
    if (!row.matched && report.holds) {
      report.holds = false;
      report.failing = e;
    }
    if (keep_entries) report.entries.push_back(std::move(row));
    if (!report.holds && !keep_entries) break;
  }
  return report;
}

bool interface_set_leq_bool(const InterfaceSet& a, const InterfaceSet& b) { return interface_set_leq(a, b).holds; }

bool interface_set_included(const InterfaceSet& a, const InterfaceSet& b) {
  std::map<History, std::vector<const Footprint*>> by_history;
  for (const auto& e : b) by_history[e.history].push_back(&e.initial);
  for (const auto& e : a) {
    auto it = by_history.find(e.history);
    if (it == by_history.end()) return false;
    if (std::none_of(it->second.begin(), it->second.end(),
                     [&](const Footprint* l) { return foot_leq(*l, e.initial); })) {
      return false;
    }
  }
  return true;
}

}  // namespace ownlin
