#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ownlin/history.hpp"
#include "ownlin/lang.hpp"
#include "ownlin/semantics.hpp"

namespace ownlin {

enum class SwapKind : std::uint8_t {
  non_ret_before_call,       // x · call  ->  call · x,  x not a return
  ret_before_call_balanced,  // ret · call -> call · ret, history stays balanced
  ret_before_non_call,       // ret · x  ->  x · ret,   x not a call
};

std::string to_string(SwapKind k);

struct SwapResult {
  Trace trace;
  SwapKind kind;
};

/// Swaps positions i and i+1 of a library-local trace z from s0 when a swap
/// rule applies, then re-checks membership of the result. Absent otherwise.
std::optional<SwapResult> try_swap(const TraceMachine& m, const Spec& spec, const State& s0, const Trace& z,
                                   std::size_t i);

/// Client-local mirror: calls may move later and returns earlier. The
/// return-before-call swap is gated on balancedness from `lib_foot`.
std::optional<SwapResult> try_client_swap(const TraceMachine& m, const Spec& spec, const State& s, const Trace& k,
                                          std::size_t i, const Footprint& lib_foot);

struct RearrangeStage {
  std::size_t k = 0;           // target index handled
  bool call = false;           // kind of the target action
  std::size_t prefix_len = 0;  // length of the aligned prefix after the stage
  std::size_t swaps = 0;
};

struct RearrangeLog {
  std::vector<RearrangeStage> stages;
  std::vector<std::pair<std::size_t, SwapKind>> swaps;  // position, rule
  std::size_t total_swaps() const { return swaps.size(); }
};

struct RearrangeResult {
  Trace trace;
  RearrangeLog log;
};

/// The input does not satisfy the procedure's precondition.
class RearrangeInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A situation the correctness argument rules out, such as a conflicting
/// return/call pair. Seeing this means there is a bug.
class RearrangeAssertion : public std::logic_error {
 public:
  RearrangeAssertion(const std::string& what, Trace at) : std::logic_error(what), trace(std::move(at)) {}
  Trace trace;
};

/// Turns lambda2 (library-local from s0) into a library-local trace whose
/// history is `target`, given (target_foot, target) is linearized by
/// (delta(s0), history(lambda2)).
RearrangeResult rearrange(const TraceMachine& m, const Spec& spec, const State& s0, const Trace& lambda2,
                          const History& target, const Footprint& target_foot);

/// Turns kappa (client-local from s) into an equivalent client-local trace
/// with history `target`, given (lib_foot, history(kappa)) is linearized by
/// (target_foot, target) and delta(s) composes with lib_foot.
RearrangeResult client_rearrange(const TraceMachine& m, const Spec& spec, const State& s, const Trace& kappa,
                                 const History& target, const Footprint& lib_foot, const Footprint& target_foot);

/// Same thread projections and the same non-interface subsequence.
bool equivalent(const Trace& a, const Trace& b);

/// Footprint bookkeeping for a history s that equals s2 up to extra calls,
/// balanced from l1 and l2 respectively with l2 below l1: the extra calls
/// combine to some lc, eval(s, l1) = eval(s2, l1) o lc and
/// eval(s2, l2) is below eval(s2, l1). Absent when the hypotheses fail.
std::optional<bool> extra_calls_identity(const History& s, const History& s2, const Footprint& l1,
                                         const Footprint& l2);

}  // namespace ownlin
