#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ownlin/algebra.hpp"
#include "ownlin/history.hpp"
#include "ownlin/law_report.hpp"

namespace ownlin {

struct Expr {
  enum class Kind : std::uint8_t { lit, tid, deref, add, neg, not_ };
  Kind kind = Kind::lit;
  Val value = 0;
  std::vector<Expr> args;

  static Expr lit(Val v) { return {Kind::lit, v, {}}; }
  static Expr tid() { return {Kind::tid, 0, {}}; }
  static Expr deref(Expr e) { return {Kind::deref, 0, {std::move(e)}}; }
  static Expr add(Expr a, Expr b) { return {Kind::add, 0, {std::move(a), std::move(b)}}; }
  static Expr neg(Expr e) { return {Kind::neg, 0, {std::move(e)}}; }
  static Expr not_(Expr e) { return {Kind::not_, 0, {std::move(e)}}; }

  std::string to_string() const;
  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Absent means the error value (the expression faulted).
std::optional<Val> expr_eval(const Expr& e, const State& s, ThreadId t);

struct Command;

struct PrimCommand {
  enum class Kind : std::uint8_t { skip, store, assume, atomic };
  Kind kind = Kind::skip;
  Expr lhs;  // store address, assume condition
  Expr rhs;  // store value
  /// Body of an atomic block: primitives, sequencing and choice only.
  std::shared_ptr<const Command> body;

  static PrimCommand skip() { return {}; }
  static PrimCommand store(Expr addr, Expr val) { return {Kind::store, std::move(addr), std::move(val), nullptr}; }
  static PrimCommand assume(Expr cond) { return {Kind::assume, std::move(cond), {}, nullptr}; }
  static PrimCommand atomic(Command body);

  std::string to_string() const;
};

/// Primitive commands are interned so traces compare them by id.
using PrimId = std::uint32_t;
PrimId intern(const PrimCommand& c);
const PrimCommand& prim_of(PrimId id);

using MethodName = std::string;

struct Command {
  enum class Kind : std::uint8_t { prim, call, seq, choice, star };
  Kind kind = Kind::prim;
  PrimId prim = 0;
  MethodName method;
  std::vector<Command> kids;

  static Command of(const PrimCommand& c) { return {Kind::prim, intern(c), {}, {}}; }
  static Command call(MethodName m) { return {Kind::call, 0, std::move(m), {}}; }
  static Command seq(std::vector<Command> cs) { return {Kind::seq, 0, {}, std::move(cs)}; }
  static Command choice(std::vector<Command> cs) { return {Kind::choice, 0, {}, std::move(cs)}; }
  static Command star(Command c) { return {Kind::star, 0, {}, {std::move(c)}}; }

  bool contains_call() const;
  bool contains_star() const;
  std::string to_string() const;
  friend bool operator==(const Command&, const Command&) = default;
};

Command desugar_if(const Expr& e, Command c1, Command c2);
Command desugar_while(const Expr& e, Command c);

/// Transformer result; absent means the command faults.
using StepResult = std::optional<std::set<State>>;

StepResult prim_step(const PrimCommand& c, ThreadId t, const State& s);
StepResult prim_step(PrimId c, ThreadId t, const State& s);

using Transformer = std::function<StepResult(ThreadId, const State&)>;

/// Exhaustively checks footprint preservation, locality and strong locality
/// of `f` for every thread in `threads` and every state pair of the universe.
LawReport validate_transformer(const Transformer& f, AlgebraId alg, const StateUniverse& universe,
                               const std::vector<ThreadId>& threads = {1, 2});

/// Writes 0 to cell 1 if it is allocated, otherwise does nothing.
StepResult probe_writer(ThreadId t, const State& s);
/// Faults without cell 1; otherwise its result depends on whether cell 2 is
/// allocated.
StepResult peeking_writer(ThreadId t, const State& s);

struct Library {
  std::map<MethodName, Command> methods;
};

struct ClientProgram {
  /// Thread t runs threads[t - 1].
  std::vector<Command> threads;
};

struct MethodSpec {
  ParamPredicate pre;
  ParamPredicate post;
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

using Spec = std::map<MethodName, MethodSpec>;

/// Throws std::invalid_argument naming the first imprecise predicate.
void require_precise(const Spec& spec, const StateUniverse& universe);

struct Bounds {
  int star = 3;
  int mgc_iterations = 2;
  int mgc_threads = 2;
  std::size_t max_trace = 12;
};

enum class ActKind : std::uint8_t { cmd, call, ret };

struct Action {
  ActKind kind = ActKind::cmd;
  ThreadId thread = 1;
  PrimId prim = 0;
  MethodName method;
  /// Transferred state on interface actions of annotated traces.
  std::optional<State> annot;

  bool is_interface() const { return kind != ActKind::cmd; }
  std::string to_string() const;

  friend bool operator==(const Action&, const Action&) = default;
  friend auto operator<=>(const Action&, const Action&) = default;
};

using Trace = std::vector<Action>;

std::string to_string(const Trace& tr);
/// Per-thread call/return alternation over matching methods.
bool check_well_formed(const Trace& tr);
/// Erases annotations.
Trace ground(const Trace& tr);
/// Interface actions of an annotated trace (missing annotations read as
/// the empty state of `alg`).
History history(const Trace& tr, AlgebraId alg);
/// Interface actions only, annotations kept.
Trace interface_part(const Trace& tr);
/// mask[i] is true when tr[i] is a command issued outside any call.
std::vector<bool> client_mask(const Trace& tr);
Trace client_proj(const Trace& tr);
Trace lib_proj(const Trace& tr);
Trace thread_proj(const Trace& tr, ThreadId t);
/// Non-interface actions only.
Trace command_proj(const Trace& tr);

enum class GenMode : std::uint8_t { complete, client_local, library_local };

std::string to_string(GenMode m);

/// Small-step generator of the bounded trace set of a program. Per-thread
/// control is a set of continuations, so each trace is reached exactly once.
class TraceMachine {
 public:
  /// Continuation stack item.
  struct Item {
    std::uint8_t tag = 0;  // 0 exec node, 1 loop, 2 return marker
    std::int32_t node = 0;
    std::int32_t count = 0;
    friend auto operator<=>(const Item&, const Item&) = default;
  };
  using Cont = std::vector<Item>;
  using ContSet = std::set<Cont>;
  /// Ground action label without thread.
  struct Label {
    ActKind kind;
    PrimId prim;
    std::int32_t method;
    friend auto operator<=>(const Label&, const Label&) = default;
  };

  /// complete: client threads over the library; client_local: client with
  /// empty method bodies; library_local: mgc_threads most general clients.
  TraceMachine(const Library* lib, const ClientProgram* client, GenMode mode, Bounds bounds);

  GenMode mode() const { return mode_; }
  const Bounds& bounds() const { return bounds_; }
  int thread_count() const { return static_cast<int>(roots_.size()); }
  const std::vector<MethodName>& methods() const { return method_names_; }

  /// Initial per-thread continuation sets.
  std::vector<ContSet> initial() const;
  /// Successors of one thread's continuation set, grouped by label.
  std::map<Label, ContSet> next(const ContSet& conts) const;
  Action make_action(const Label& l, ThreadId t) const;
  Label label_of(const Action& a) const;

  /// Whether the ground trace belongs to the trace set, ignoring the length
  /// bound.
  bool accepts(const Trace& tr) const;

  /// Visits every trace of length <= max_trace once, each prefix before its
  /// extensions. The visitor returns false to prune the subtree.
  void explore(const std::function<bool(const Trace&)>& visit) const;
  /// Prefix-closed bounded trace set.
  std::set<Trace> trace_set() const;

 private:
  struct Node {
    Command::Kind kind = Command::Kind::prim;
    PrimId prim = 0;
    std::int32_t method = -1;
    std::vector<std::int32_t> kids;
    std::int32_t bound = -1;
  };

  std::int32_t compile(const Command& c);
  std::int32_t method_index(const MethodName& m) const;
  void expand(Cont cont, std::vector<std::pair<Label, Cont>>& out) const;

  GenMode mode_;
  Bounds bounds_;
  std::vector<Node> nodes_;
  std::vector<MethodName> method_names_;
  std::vector<std::int32_t> bodies_;  // per method index; -1 when absent
  std::vector<std::int32_t> roots_;   // per thread
};

/// Convenience wrapper over TraceMachine::trace_set.
std::set<Trace> trace_set(const Library* lib, const ClientProgram* client, GenMode mode, const Bounds& bounds);

}  // namespace ownlin
