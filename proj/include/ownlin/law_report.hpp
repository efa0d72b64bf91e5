#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ownlin {

struct Counterexample {
  std::string law;
  std::string inputs;
  std::string expected;
  std::string got;
};

/// Outcome of an exhaustive law check. Only the first few counterexamples
/// are retained; `violations` counts all of them.
struct LawReport {
  static constexpr std::size_t kMaxKept = 16;

  std::vector<Counterexample> counterexamples;
  std::size_t violations = 0;
  std::size_t cases = 0;

  bool passed() const { return counterexamples.empty(); }

  void fail(std::string law, std::string inputs, std::string expected, std::string got) {
    ++violations;
    // The first witness of every law is always kept.
    if (counterexamples.size() < kMaxKept || first(law) == nullptr) {
      counterexamples.push_back({std::move(law), std::move(inputs), std::move(expected), std::move(got)});
    }
  }

  void merge(const LawReport& other) {
    cases += other.cases;
    violations += other.violations;
    for (const auto& c : other.counterexamples) {
      if (counterexamples.size() < kMaxKept || first(c.law) == nullptr) counterexamples.push_back(c);
    }
  }

  /// First counterexample for `law`, or nullptr.
  const Counterexample* first(const std::string& law) const {
    for (const auto& c : counterexamples) {
      if (c.law == law) return &c;
    }
    return nullptr;
  }
};

}  // namespace ownlin
