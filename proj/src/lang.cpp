#include "ownlin/lang.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "ownlin/footprint.hpp"

namespace ownlin {

std::string Expr::to_string() const {
  switch (kind) {
    case Kind::lit:
      return std::to_string(value);
    case Kind::tid:
      return "tid";
    case Kind::deref:
      return "[" + args[0].to_string() + "]";
    case Kind::add:
      return "(" + args[0].to_string() + "+" + args[1].to_string() + ")";
    case Kind::neg:
      return "-" + args[0].to_string();
    case Kind::not_:
      return "!" + args[0].to_string();
  }
  return "?";
}

std::optional<Val> expr_eval(const Expr& e, const State& s, ThreadId t) {
  switch (e.kind) {
    case Expr::Kind::lit:
      return e.value;
    case Expr::Kind::tid:
      return static_cast<Val>(t);
    case Expr::Kind::deref: {
      auto a = expr_eval(e.args[0], s, t);
      if (!a) return std::nullopt;
      const Cell* c = s.find(*a);
      if (!c) return std::nullopt;
      return c->val;  // permissions are ignored when reading
    }
    case Expr::Kind::add: {
      auto a = expr_eval(e.args[0], s, t);
      auto b = expr_eval(e.args[1], s, t);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Expr::Kind::neg: {
      auto a = expr_eval(e.args[0], s, t);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Expr::Kind::not_: {
      auto a = expr_eval(e.args[0], s, t);
      if (!a) return std::nullopt;
      return *a == 0 ? 1 : 0;
    }
  }
  return std::nullopt;
}

PrimCommand PrimCommand::atomic(Command body) {
  if (body.contains_call() || body.contains_star()) {
    throw std::invalid_argument("atomic block may not contain calls or loops: " + body.to_string());
  }
  PrimCommand c;
  c.kind = Kind::atomic;
  c.body = std::make_shared<const Command>(std::move(body));
  return c;
}

std::string PrimCommand::to_string() const {
  switch (kind) {
    case Kind::skip:
      return "skip";
    case Kind::store:
      return "[" + lhs.to_string() + "]=" + rhs.to_string();
    case Kind::assume:
      return "assume(" + lhs.to_string() + ")";
    case Kind::atomic:
      return "atomic{" + body->to_string() + "}";
  }
  return "?";
}

namespace {

struct PrimTable {
  std::mutex mu;
  std::deque<PrimCommand> prims;  // stable references
  std::map<std::string, PrimId> ids;
};

PrimTable& prim_table() {
  static PrimTable table;
  return table;
}

}  // namespace

PrimId intern(const PrimCommand& c) {
  auto key = c.to_string();  // may consult the table, so before locking
  auto& tab = prim_table();
  std::lock_guard lock(tab.mu);
  auto it = tab.ids.find(key);
  if (it != tab.ids.end()) return it->second;
  auto id = static_cast<PrimId>(tab.prims.size());
  tab.prims.push_back(c);
  tab.ids.emplace(std::move(key), id);
  return id;
}

const PrimCommand& prim_of(PrimId id) {
  auto& tab = prim_table();
  std::lock_guard lock(tab.mu);
  if (id >= tab.prims.size()) throw std::out_of_range("unknown primitive command id");
  return tab.prims[id];
}

bool Command::contains_call() const {
  if (kind == Kind::call) return true;
  return std::any_of(kids.begin(), kids.end(), [](const Command& c) { return c.contains_call(); });
}

bool Command::contains_star() const {
  if (kind == Kind::star) return true;
  return std::any_of(kids.begin(), kids.end(), [](const Command& c) { return c.contains_star(); });
}

std::string Command::to_string() const {
  auto join = [&](const char* sep) {
    std::string out = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out += sep;
      out += kids[i].to_string();
    }
    return out + ")";
  };
  switch (kind) {
    case Kind::prim:
      return prim_of(prim).to_string();
    case Kind::call:
      return method;
    case Kind::seq:
      return join("; ");
    case Kind::choice:
      return join(" + ");
    case Kind::star:
      return "(" + kids[0].to_string() + ")*";
  }
  return "?";
}

Command desugar_if(const Expr& e, Command c1, Command c2) {
  return Command::choice({Command::seq({Command::of(PrimCommand::assume(e)), std::move(c1)}),
                          Command::seq({Command::of(PrimCommand::assume(Expr::not_(e))), std::move(c2)})});
}

Command desugar_while(const Expr& e, Command c) {
  return Command::seq({Command::star(Command::seq({Command::of(PrimCommand::assume(e)), std::move(c)})),
                       Command::of(PrimCommand::assume(Expr::not_(e)))});
}

namespace {

StepResult run_block(const Command& c, ThreadId t, const std::set<State>& in) {
  std::set<State> out;
  switch (c.kind) {
    case Command::Kind::prim:
      for (const auto& s : in) {
        auto r = prim_step(c.prim, t, s);
        if (!r) return std::nullopt;
        out.insert(r->begin(), r->end());
      }
      return out;
    case Command::Kind::seq: {
      std::set<State> cur = in;
      for (const auto& k : c.kids) {
        auto r = run_block(k, t, cur);
        if (!r) return std::nullopt;
        cur = std::move(*r);
      }
      return cur;
    }
    case Command::Kind::choice:
      for (const auto& k : c.kids) {
        auto r = run_block(k, t, in);
        if (!r) return std::nullopt;
        out.insert(r->begin(), r->end());
      }
      return out;
    default:
      throw std::logic_error("atomic block with a call or loop");
  }
}

}  // namespace

StepResult prim_step(const PrimCommand& c, ThreadId t, const State& s) {
  switch (c.kind) {
    case PrimCommand::Kind::skip:
      return std::set<State>{s};
    case PrimCommand::Kind::store: {
      auto addr = expr_eval(c.lhs, s, t);
      auto val = expr_eval(c.rhs, s, t);
      if (!addr || !val) return std::nullopt;
      const Cell* cell = s.find(*addr);
      if (!cell || cell->perm != Perm(1)) return std::nullopt;
      return std::set<State>{s.with(*addr, Cell{*val, Perm(1)})};
    }
    case PrimCommand::Kind::assume: {
      auto v = expr_eval(c.lhs, s, t);
      if (!v) return std::nullopt;
      if (*v == 0) return std::set<State>{};
      return std::set<State>{s};
    }
    case PrimCommand::Kind::atomic:
      return run_block(*c.body, t, {s});
  }
  return std::nullopt;
}

StepResult prim_step(PrimId c, ThreadId t, const State& s) { return prim_step(prim_of(c), t, s); }

namespace {

std::string show(const StepResult& r) {
  if (!r) return "fault";
  std::string out = "{";
  bool first = true;
  for (const auto& s : *r) {
    if (!first) out += ", ";
    first = false;
    out += s.to_string();
  }
  return out + "}";
}

}  // namespace

LawReport validate_transformer(const Transformer& f, AlgebraId alg, const StateUniverse& universe,
                               const std::vector<ThreadId>& threads) {
  LawReport report;
  auto states = universe.enumerate(alg);
  for (ThreadId t : threads) {
    for (const auto& s : states) {
      ++report.cases;
      auto r = f(t, s);
      if (!r) continue;
      for (const auto& out : *r) {
        if (!(delta(out) == delta(s))) {
          report.fail("footprint-preservation", "t=" + std::to_string(t) + ", s=" + s.to_string(),
                      delta(s).to_string(), out.to_string());
          break;
        }
      }
    }
    for (const auto& s1 : states) {
      auto r1 = f(t, s1);
      if (!r1) continue;
      for (const auto& s2 : states) {
        auto joined = star(s1, s2);
        if (!joined) continue;
        ++report.cases;
        auto big = f(t, *joined);
        std::set<State> framed;
        bool framed_ok = true;
        for (const auto& x : *r1) {
          auto y = star(x, s2);
          if (!y) {
            framed_ok = false;
            break;
          }
          framed.insert(*y);
        }
        std::string inputs = "t=" + std::to_string(t) + ", s1=" + s1.to_string() + ", s2=" + s2.to_string();
        std::string expected = framed_ok ? show(framed) : std::string("undefined frame");
        bool subset = big && framed_ok && std::includes(framed.begin(), framed.end(), big->begin(), big->end());
        if (!subset) report.fail("locality", inputs, "subset of " + expected, show(big));
        if (!(big && framed_ok && *big == framed)) report.fail("strong-locality", inputs, expected, show(big));
      }
    }
  }
  return report;
}

StepResult probe_writer(ThreadId, const State& s) {
  if (s.contains(1)) return std::set<State>{s.with(1, Cell{0, Perm(1)})};
  return std::set<State>{s};
}

StepResult peeking_writer(ThreadId, const State& s) {
  if (!s.contains(1)) return std::nullopt;
  if (s.contains(2)) return std::set<State>{s.with(1, Cell{0, Perm(1)})};
  return std::set<State>{s.with(1, Cell{0, Perm(1)}), s.with(1, Cell{1, Perm(1)})};
}

void require_precise(const Spec& spec, const StateUniverse& universe) {
  for (const auto& [m, ms] : spec) {
    for (const auto* side : {&ms.pre, &ms.post}) {
      for (const auto& [t, p] : side->by_thread) {
        if (!is_precise(p, universe)) {
          throw std::invalid_argument("imprecise " + std::string(side == &ms.pre ? "precondition" : "postcondition") +
                                      " of " + m + " for thread " + std::to_string(t));
        }
      }
    }
  }
}

std::string Action::to_string() const {
  std::ostringstream os;
  os << '(' << thread << ", ";
  switch (kind) {
    case ActKind::cmd:
      os << prim_of(prim).to_string();
      break;
    case ActKind::call:
    case ActKind::ret:
      os << (kind == ActKind::call ? "call " : "ret ") << method;
      if (annot) os << ' ' << annot->to_string();
      break;
  }
  os << ')';
  return os.str();
}

std::string to_string(const Trace& tr) {
  std::string out;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (i) out += ' ';
    out += tr[i].to_string();
  }
  return out.empty() ? "eps" : out;
}

bool check_well_formed(const Trace& tr) {
  std::map<ThreadId, const MethodName*> open;
  for (const auto& a : tr) {
    if (a.kind == ActKind::cmd) continue;
    auto& slot = open[a.thread];
    if (a.kind == ActKind::call) {
      if (slot) return false;
      slot = &a.method;
    } else {
      if (!slot || *slot != a.method) return false;
      slot = nullptr;
    }
  }
  return true;
}

Trace ground(const Trace& tr) {
  Trace out = tr;
  for (auto& a : out) a.annot.reset();
  return out;
}

History history(const Trace& tr, AlgebraId alg) {
  History h;
  for (const auto& a : tr) {
    if (!a.is_interface()) continue;
    h.push_back(InterfaceAction{a.thread, a.kind == ActKind::call ? CallKind::call : CallKind::ret, a.method,
                                a.annot ? *a.annot : State(alg)});
  }
  return h;
}

Trace interface_part(const Trace& tr) {
  Trace out;
  std::copy_if(tr.begin(), tr.end(), std::back_inserter(out), [](const Action& a) { return a.is_interface(); });
  return out;
}

std::vector<bool> client_mask(const Trace& tr) {
  std::vector<bool> mask(tr.size());
  std::map<ThreadId, bool> inside;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& a = tr[i];
    if (a.kind == ActKind::call) {
      inside[a.thread] = true;
    } else if (a.kind == ActKind::ret) {
      inside[a.thread] = false;
    } else {
      mask[i] = !inside[a.thread];
    }
  }
  return mask;
}

namespace {

Trace filter(const Trace& tr, bool keep_client) {
  auto mask = client_mask(tr);
  Trace out;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr[i].is_interface() || mask[i] == keep_client) out.push_back(tr[i]);
  }
  return out;
}

}  // namespace

Trace client_proj(const Trace& tr) { return filter(tr, true); }
Trace lib_proj(const Trace& tr) { return filter(tr, false); }

Trace thread_proj(const Trace& tr, ThreadId t) {
  Trace out;
  std::copy_if(tr.begin(), tr.end(), std::back_inserter(out), [t](const Action& a) { return a.thread == t; });
  return out;
}

Trace command_proj(const Trace& tr) {
  Trace out;
  std::copy_if(tr.begin(), tr.end(), std::back_inserter(out), [](const Action& a) { return !a.is_interface(); });
  return out;
}

std::string to_string(GenMode m) {
  switch (m) {
    case GenMode::complete:
      return "complete";
    case GenMode::client_local:
      return "client-local";
    case GenMode::library_local:
      return "library-local";
  }
  return "?";
}

namespace {

constexpr std::uint8_t kExec = 0, kLoop = 1, kRet = 2;

void collect_calls(const Command& c, std::set<MethodName>& out) {
  if (c.kind == Command::Kind::call) out.insert(c.method);
  for (const auto& k : c.kids) collect_calls(k, out);
}

}  // namespace

TraceMachine::TraceMachine(const Library* lib, const ClientProgram* client, GenMode mode, Bounds bounds)
    : mode_(mode), bounds_(bounds) {
  std::set<MethodName> names;
  if (lib) {
    for (const auto& [m, body] : lib->methods) {
      if (body.contains_call()) throw std::invalid_argument("nested call in body of method " + m);
      names.insert(m);
    }
  }
  if (mode != GenMode::library_local) {
    if (!client) throw std::invalid_argument("client program required");
    std::set<MethodName> called;
    for (const auto& c : client->threads) collect_calls(c, called);
    for (const auto& m : called) {
      if (mode == GenMode::complete && !names.count(m)) throw std::invalid_argument("client calls unknown method " + m);
      names.insert(m);
    }
  } else if (!lib) {
    throw std::invalid_argument("library required");
  }
  method_names_.assign(names.begin(), names.end());
  bodies_.assign(method_names_.size(), -1);
  if (mode != GenMode::client_local && lib) {
    for (std::size_t i = 0; i < method_names_.size(); ++i) {
      auto it = lib->methods.find(method_names_[i]);
      if (it != lib->methods.end()) bodies_[i] = compile(it->second);
    }
  }
  if (mode == GenMode::library_local) {
    std::vector<Command> calls;
    for (const auto& m : method_names_) calls.push_back(Command::call(m));
    const bool any = !calls.empty();
    Command mgc = any ? Command::star(Command::choice(std::move(calls))) : Command::seq({});
    std::int32_t root = compile(mgc);
    if (any) nodes_[static_cast<std::size_t>(root)].bound = bounds_.mgc_iterations;
    roots_.assign(static_cast<std::size_t>(std::max(bounds_.mgc_threads, 0)), root);
  } else {
    for (const auto& c : client->threads) roots_.push_back(compile(c));
  }
}

std::int32_t TraceMachine::method_index(const MethodName& m) const {
  auto it = std::lower_bound(method_names_.begin(), method_names_.end(), m);
  if (it == method_names_.end() || *it != m) throw std::invalid_argument("unknown method " + m);
  return static_cast<std::int32_t>(it - method_names_.begin());
}

std::int32_t TraceMachine::compile(const Command& c) {
  Node n;
  n.kind = c.kind;
  n.prim = c.prim;
  if (c.kind == Command::Kind::call) n.method = method_index(c.method);
  for (const auto& k : c.kids) n.kids.push_back(compile(k));
  nodes_.push_back(std::move(n));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::vector<TraceMachine::ContSet> TraceMachine::initial() const {
  std::vector<ContSet> out;
  for (auto r : roots_) out.push_back(ContSet{Cont{Item{kExec, r, 0}}});
  return out;
}

void TraceMachine::expand(Cont cont, std::vector<std::pair<Label, Cont>>& out) const {
  if (cont.empty()) return;
  Item it = cont.back();
  cont.pop_back();
  if (it.tag == kRet) {
    out.push_back({Label{ActKind::ret, 0, it.node}, std::move(cont)});
    return;
  }
  const Node& n = nodes_[it.node];
  if (it.tag == kLoop) {
    expand(cont, out);
    int bound = n.bound >= 0 ? n.bound : bounds_.star;
    if (it.count < bound) {
      cont.push_back(Item{kLoop, it.node, it.count + 1});
      cont.push_back(Item{kExec, n.kids[0], 0});
      expand(std::move(cont), out);
    }
    return;
  }
  switch (n.kind) {
    case Command::Kind::prim:
      out.push_back({Label{ActKind::cmd, n.prim, -1}, std::move(cont)});
      return;
    case Command::Kind::call:
      cont.push_back(Item{kRet, n.method, 0});
      if (mode_ != GenMode::client_local) {
        std::int32_t body = bodies_[static_cast<std::size_t>(n.method)];
        if (body >= 0) cont.push_back(Item{kExec, body, 0});
      }
      out.push_back({Label{ActKind::call, 0, n.method}, std::move(cont)});
      return;
    case Command::Kind::seq:
      for (auto k = n.kids.rbegin(); k != n.kids.rend(); ++k) cont.push_back(Item{kExec, *k, 0});
      expand(std::move(cont), out);
      return;
    case Command::Kind::choice:
      for (auto k : n.kids) {
        Cont branch = cont;
        branch.push_back(Item{kExec, k, 0});
        expand(std::move(branch), out);
      }
      return;
    case Command::Kind::star:
      cont.push_back(Item{kLoop, it.node, 0});
      expand(std::move(cont), out);
      return;
  }
}

std::map<TraceMachine::Label, TraceMachine::ContSet> TraceMachine::next(const ContSet& conts) const {
  std::map<Label, ContSet> out;
  std::vector<std::pair<Label, Cont>> steps;
  for (const auto& c : conts) {
    steps.clear();
    expand(c, steps);
    for (auto& [l, k] : steps) out[l].insert(std::move(k));
  }
  return out;
}

Action TraceMachine::make_action(const Label& l, ThreadId t) const {
  Action a;
  a.kind = l.kind;
  a.thread = t;
  if (l.kind == ActKind::cmd) {
    a.prim = l.prim;
  } else {
    a.method = method_names_[static_cast<std::size_t>(l.method)];
  }
  return a;
}

TraceMachine::Label TraceMachine::label_of(const Action& a) const {
  if (a.kind == ActKind::cmd) return Label{ActKind::cmd, a.prim, -1};
  return Label{a.kind, 0, method_index(a.method)};
}

bool TraceMachine::accepts(const Trace& tr) const {
  auto conts = initial();
  for (const auto& a : tr) {
    if (a.thread < 1 || a.thread > thread_count()) return false;
    if (a.is_interface() && !std::binary_search(method_names_.begin(), method_names_.end(), a.method)) return false;
    auto& mine = conts[static_cast<std::size_t>(a.thread - 1)];
    auto succ = next(mine);
    auto it = succ.find(label_of(a));
    if (it == succ.end()) return false;
    mine = std::move(it->second);
  }
  return true;
}

void TraceMachine::explore(const std::function<bool(const Trace&)>& visit) const {
  Trace tr;
  auto conts = initial();
  std::function<void()> dfs = [&] {
    if (!visit(tr)) return;
    if (tr.size() >= bounds_.max_trace) return;
    for (std::size_t t = 0; t < conts.size(); ++t) {
      auto succ = next(conts[t]);
      for (auto& [label, cs] : succ) {
        ContSet saved = std::move(conts[t]);
        conts[t] = std::move(cs);
        tr.push_back(make_action(label, static_cast<ThreadId>(t + 1)));
        dfs();
        tr.pop_back();
        conts[t] = std::move(saved);
      }
    }
  };
  dfs();
}

std::set<Trace> TraceMachine::trace_set() const {
  std::set<Trace> out;
  explore([&](const Trace& tr) {
    out.insert(tr);
    return true;
  });
  return out;
}

std::set<Trace> trace_set(const Library* lib, const ClientProgram* client, GenMode mode, const Bounds& bounds) {
  return TraceMachine(lib, client, mode, bounds).trace_set();
}

}  // namespace ownlin
