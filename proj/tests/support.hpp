#pragma once

// Shared generators for the unit tests and the acceptance binary.

#include <functional>
#include <map>
#include <random>
#include <vector>

#include "ownlin/history.hpp"

namespace ownlin::testing {

inline InterfaceAction act(ThreadId t, CallKind k, const std::string& m, State s = State(AlgebraId::ram)) {
  return InterfaceAction{t, k, m, std::move(s)};
}
inline InterfaceAction call(ThreadId t, const std::string& m, State s = State(AlgebraId::ram)) {
  return act(t, CallKind::call, m, std::move(s));
}
inline InterfaceAction ret(ThreadId t, const std::string& m, State s = State(AlgebraId::ram)) {
  return act(t, CallKind::ret, m, std::move(s));
}

/// Every well-formed history of length <= max_len over threads 1..n_threads
/// and the given methods, with empty annotations.
inline std::vector<History> all_histories(std::size_t max_len, int n_threads, const std::vector<std::string>& methods) {
  std::vector<History> out;
  std::function<void(History&, std::map<ThreadId, std::string>&)> go = [&](History& h, auto& open) {
    out.push_back(h);
    if (h.size() == max_len) return;
    for (ThreadId t = 1; t <= n_threads; ++t) {
      auto it = open.find(t);
      if (it != open.end()) {
        std::string m = it->second;
        h.push_back(ret(t, m));
        open.erase(it);
        go(h, open);
        open[t] = m;
        h.pop_back();
      } else {
        for (const auto& m : methods) {
          h.push_back(call(t, m));
          open[t] = m;
          go(h, open);
          open.erase(t);
          h.pop_back();
        }
      }
    }
  };
  History h;
  std::map<ThreadId, std::string> open;
  go(h, open);
  return out;
}

/// All interleavings of h's per-thread projections.
inline std::vector<History> reorderings(const History& h) {
  std::map<ThreadId, History> by;
  for (const auto& a : h) by[a.thread].push_back(a);
  std::vector<History> lanes;
  for (auto& [t, l] : by) lanes.push_back(l);
  std::vector<History> out;
  std::vector<std::size_t> pos(lanes.size());
  History cur;
  std::function<void()> go = [&] {
    if (cur.size() == h.size()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (pos[i] == lanes[i].size()) continue;
      cur.push_back(lanes[i][pos[i]++]);
      go();
      --pos[i];
      cur.pop_back();
    }
  };
  go();
  return out;
}

/// A random interleaving of h's per-thread projections.
inline History random_reordering(const History& h, std::mt19937_64& rng) {
  std::map<ThreadId, History> by;
  for (const auto& a : h) by[a.thread].push_back(a);
  std::vector<History> lanes;
  for (auto& [t, l] : by) lanes.push_back(l);
  std::vector<std::size_t> pos(lanes.size());
  History out;
  while (out.size() < h.size()) {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < lanes.size(); ++i)
      if (pos[i] < lanes[i].size()) live.push_back(i);
    std::size_t i = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
    out.push_back(lanes[i][pos[i]++]);
  }
  return out;
}

/// Random well-formed history of exactly `len` actions.
inline History random_history(std::size_t len, int n_threads, const std::vector<std::string>& methods,
                              std::mt19937_64& rng) {
  History h;
  std::map<ThreadId, std::string> open;
  std::uniform_int_distribution<int> pick_t(1, n_threads);
  std::uniform_int_distribution<std::size_t> pick_m(0, methods.size() - 1);
  while (h.size() < len) {
    ThreadId t = pick_t(rng);
    auto it = open.find(t);
    if (it != open.end()) {
      h.push_back(ret(t, it->second));
      open.erase(it);
    } else {
      auto m = methods[pick_m(rng)];
      h.push_back(call(t, m));
      open[t] = m;
    }
  }
  return h;
}

}  // namespace ownlin::testing
