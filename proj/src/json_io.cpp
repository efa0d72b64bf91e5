#include "ownlin/json_io.hpp"

namespace ownlin {

namespace {

Loc parse_loc(const std::string& key) {
  try {
    std::size_t used = 0;
    Loc l = std::stoll(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return l;
  } catch (const std::exception&) {
    throw FormatError("bad location key '" + key + "'");
  }
}

Perm perm_from_json(const json& j) {
  if (j.is_number_integer()) return Perm(j.get<std::int64_t>());
  if (j.is_string()) return parse_perm(j.get<std::string>());
  throw FormatError("bad permission " + j.dump());
}

}  // namespace

json state_to_json(const State& s) {
  json cells = json::object();
  for (const auto& [loc, c] : s.cells()) {
    if (s.algebra() == AlgebraId::ram) {
      cells[std::to_string(loc)] = c.val;
    } else {
      cells[std::to_string(loc)] = json::array({c.val, perm_to_string(c.perm)});
    }
  }
  return json{{"alg", to_string(s.algebra())}, {"cells", cells}};
}

State state_from_json(const json& j, AlgebraId alg) {
  if (!j.is_object()) throw FormatError("state must be an object: " + j.dump());
  const json* cells = &j;
  if (j.contains("cells")) {
    cells = &j.at("cells");
    if (j.contains("alg") && parse_algebra(j.at("alg").get<std::string>()) != alg) {
      throw FormatError("state algebra does not match: " + j.dump());
    }
  }
  std::vector<State::Entry> entries;
  for (const auto& [key, v] : cells->items()) {
    Cell c;
    if (v.is_array()) {
      if (v.size() != 2) throw FormatError("cell must be [value, perm]: " + v.dump());
      c.val = v[0].get<Val>();
      c.perm = perm_from_json(v[1]);
    } else if (v.is_number_integer()) {
      c.val = v.get<Val>();
    } else {
      throw FormatError("bad cell " + v.dump());
    }
    entries.push_back({parse_loc(key), c});
  }
  try {
    return State::from_entries(alg, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

State state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("alg")) throw FormatError("state needs an \"alg\" field: " + j.dump());
  return state_from_json(j, parse_algebra(j.at("alg").get<std::string>()));
}

json footprint_to_json(const Footprint& l) {
  if (l.algebra() == AlgebraId::ram) {
    json locs = json::array();
    for (const auto& [loc, c] : l.entries()) locs.push_back(loc);
    return json{{"alg", "ram"}, {"locs", locs}};
  }
  json cells = json::object();
  for (const auto& [loc, c] : l.entries()) {
    if (c.full) {
      cells[std::to_string(loc)] = "full";
    } else {
      cells[std::to_string(loc)] = json{{"perm", perm_to_string(c.perm)}, {"val", c.val}};
    }
  }
  return json{{"alg", "ram_pi"}, {"cells", cells}};
}

Footprint footprint_from_json(const json& j) {
  AlgebraId alg = parse_algebra(j.at("alg").get<std::string>());
  std::vector<Footprint::Entry> entries;
  if (alg == AlgebraId::ram) {
    for (const auto& l : j.at("locs")) entries.push_back({l.get<Loc>(), FootCell::whole()});
  } else {
    for (const auto& [key, v] : j.at("cells").items()) {
      if (v.is_string() && v.get<std::string>() == "full") {
        entries.push_back({parse_loc(key), FootCell::whole()});
      } else {
        entries.push_back({parse_loc(key), FootCell::partial(perm_from_json(v.at("perm")), v.at("val").get<Val>())});
      }
    }
  }
  try {
    return Footprint::from_entries(alg, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json history_to_json(const History& h) {
  json out = json::array();
  for (const auto& a : h) {
    out.push_back(json{{"t", a.thread}, {"k", a.is_call() ? "call" : "ret"}, {"m", a.method}, {"s", state_to_json(a.state)}});
  }
  return out;
}

History history_from_json(const json& j, AlgebraId alg) {
  if (!j.is_array()) throw FormatError("history must be an array");
  History h;
  for (const auto& a : j) {
    auto k = a.at("k").get<std::string>();
    if (k != "call" && k != "ret") throw FormatError("action kind must be call or ret: " + a.dump());
    h.push_back(InterfaceAction{a.at("t").get<ThreadId>(), k == "call" ? CallKind::call : CallKind::ret,
                                a.at("m").get<std::string>(),
                                a.contains("s") ? state_from_json(a.at("s"), alg) : State(alg)});
  }
  return h;
}

json interface_set_to_json(const InterfaceSet& set) {
  json out = json::array();
  for (const auto& e : set) out.push_back(json{{"initial", footprint_to_json(e.initial)}, {"history", history_to_json(e.history)}});
  return out;
}

json trace_to_json(const Trace& tr) {
  json out = json::array();
  for (const auto& a : tr) {
    json x{{"t", a.thread}};
    if (a.kind == ActKind::cmd) {
      x["c"] = prim_of(a.prim).to_string();
    } else {
      x["k"] = a.kind == ActKind::call ? "call" : "ret";
      x["m"] = a.method;
      if (a.annot) x["s"] = state_to_json(*a.annot);
    }
    out.push_back(std::move(x));
  }
  return out;
}

json expr_to_json(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::lit:
      return e.value;
    case Expr::Kind::tid:
      return "tid";
    case Expr::Kind::deref:
      return json{{"deref", expr_to_json(e.args[0])}};
    case Expr::Kind::add:
      return json{{"add", json::array({expr_to_json(e.args[0]), expr_to_json(e.args[1])})}};
    case Expr::Kind::neg:
      return json{{"neg", expr_to_json(e.args[0])}};
    case Expr::Kind::not_:
      return json{{"not", expr_to_json(e.args[0])}};
  }
  return nullptr;
}

Expr expr_from_json(const json& j) {
  if (j.is_number_integer()) return Expr::lit(j.get<Val>());
  if (j.is_string() && j.get<std::string>() == "tid") return Expr::tid();
  if (j.is_object() && j.size() == 1) {
    const auto& [key, v] = *j.items().begin();
    if (key == "deref") return Expr::deref(expr_from_json(v));
    if (key == "neg") return Expr::neg(expr_from_json(v));
    if (key == "not") return Expr::not_(expr_from_json(v));
    if (key == "add") {
      if (!v.is_array() || v.size() != 2) throw FormatError("add takes two operands: " + j.dump());
      return Expr::add(expr_from_json(v[0]), expr_from_json(v[1]));
    }
  }
  throw FormatError("bad expression " + j.dump());
}

namespace {

json prim_to_json(const PrimCommand& p) {
  switch (p.kind) {
    case PrimCommand::Kind::skip:
      return "skip";
    case PrimCommand::Kind::store:
      return json{{"store", json::array({expr_to_json(p.lhs), expr_to_json(p.rhs)})}};
    case PrimCommand::Kind::assume:
      return json{{"assume", expr_to_json(p.lhs)}};
    case PrimCommand::Kind::atomic:
      return json{{"atomic", command_to_json(*p.body)}};
  }
  return nullptr;
}

std::vector<Command> command_list(const json& v) {
  if (!v.is_array()) throw FormatError("expected a list of commands: " + v.dump());
  std::vector<Command> out;
  for (const auto& c : v) out.push_back(command_from_json(c));
  return out;
}

}  // namespace

json command_to_json(const Command& c) {
  auto list = [&] {
    json a = json::array();
    for (const auto& k : c.kids) a.push_back(command_to_json(k));
    return a;
  };
  switch (c.kind) {
    case Command::Kind::prim:
      return prim_to_json(prim_of(c.prim));
    case Command::Kind::call:
      return json{{"call", c.method}};
    case Command::Kind::seq:
      return json{{"seq", list()}};
    case Command::Kind::choice:
      return json{{"choice", list()}};
    case Command::Kind::star:
      return json{{"star", command_to_json(c.kids[0])}};
  }
  return nullptr;
}

Command command_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "skip") return Command::of(PrimCommand::skip());
  if (!j.is_object() || j.size() != 1) throw FormatError("bad command " + j.dump());
  const auto& [key, v] = *j.items().begin();
  if (key == "prim") return command_from_json(v);
  if (key == "skip") return Command::of(PrimCommand::skip());
  if (key == "store") {
    if (!v.is_array() || v.size() != 2) throw FormatError("store takes [address, value]: " + j.dump());
    return Command::of(PrimCommand::store(expr_from_json(v[0]), expr_from_json(v[1])));
  }
  if (key == "assume") return Command::of(PrimCommand::assume(expr_from_json(v)));
  if (key == "atomic") {
    try {
      return Command::of(PrimCommand::atomic(command_from_json(v)));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (key == "call") return Command::call(v.get<std::string>());
  if (key == "seq") return Command::seq(command_list(v));
  if (key == "choice") return Command::choice(command_list(v));
  if (key == "star") return Command::star(command_from_json(v));
  if (key == "if") {
    if (!v.is_array() || v.size() < 2 || v.size() > 3) throw FormatError("if takes [cond, then, else?]: " + j.dump());
    Command other = v.size() == 3 ? command_from_json(v[2]) : Command::of(PrimCommand::skip());
    return desugar_if(expr_from_json(v[0]), command_from_json(v[1]), std::move(other));
  }
  if (key == "while") {
    if (!v.is_array() || v.size() != 2) throw FormatError("while takes [cond, body]: " + j.dump());
    return desugar_while(expr_from_json(v[0]), command_from_json(v[1]));
  }
  throw FormatError("unknown command node '" + key + "'");
}

namespace {

State instantiate(const json& tmpl, AlgebraId alg, ThreadId t) {
  if (!tmpl.is_object()) throw FormatError("predicate member must be an object: " + tmpl.dump());
  const json& cells = tmpl.contains("cells") ? tmpl.at("cells") : tmpl;
  json concrete = json::object();
  for (const auto& [key, v] : cells.items()) {
    std::string loc = key == "t" ? std::to_string(t) : key;
    json val = v;
    auto subst = [t](json& x) {
      if (x.is_string() && x.get<std::string>() == "t") x = t;
    };
    if (val.is_array() && !val.empty()) {
      subst(val[0]);
    } else {
      subst(val);
    }
    if (concrete.contains(loc)) throw FormatError("template names location " + loc + " twice for thread " + std::to_string(t));
    concrete[loc] = val;
  }
  return state_from_json(concrete, alg);
}

Predicate predicate_from_list(const json& list, AlgebraId alg, ThreadId t) {
  if (!list.is_array()) throw FormatError("predicate must be a list of states: " + list.dump());
  Predicate p;
  p.algebra = alg;
  for (const auto& m : list) p.states.insert(instantiate(m, alg, t));
  return p;
}

}  // namespace

ParamPredicate param_predicate_from_json(const json& j, AlgebraId alg, int threads) {
  ParamPredicate out;
  if (j.is_array()) {
    for (ThreadId t = 1; t <= threads; ++t) out.by_thread[t] = predicate_from_list(j, alg, t);
  } else if (j.is_object()) {
    for (const auto& [key, v] : j.items()) {
      ThreadId t = static_cast<ThreadId>(parse_loc(key));
      out.by_thread[t] = predicate_from_list(v, alg, t);
    }
  } else {
    throw FormatError("bad predicate " + j.dump());
  }
  return out;
}

json param_predicate_to_json(const ParamPredicate& p) {
  json out = json::object();
  for (const auto& [t, pred] : p.by_thread) {
    json list = json::array();
    for (const auto& s : pred.states) list.push_back(state_to_json(s)["cells"]);
    out[std::to_string(t)] = list;
  }
  return out;
}

Spec spec_from_json(const json& j, AlgebraId alg, int threads) {
  Spec out;
  for (const auto& [m, v] : j.items()) {
    out[m] = MethodSpec{param_predicate_from_json(v.at("pre"), alg, threads),
                        param_predicate_from_json(v.at("post"), alg, threads)};
  }
  return out;
}

json spec_to_json(const Spec& s) {
  json out = json::object();
  for (const auto& [m, ms] : s) out[m] = json{{"pre", param_predicate_to_json(ms.pre)}, {"post", param_predicate_to_json(ms.post)}};
  return out;
}

Bounds bounds_from_json(const json& j, Bounds b) {
  if (j.contains("star")) b.star = j.at("star").get<int>();
  if (j.contains("mgc_iterations")) b.mgc_iterations = j.at("mgc_iterations").get<int>();
  if (j.contains("mgc_threads")) b.mgc_threads = j.at("mgc_threads").get<int>();
  if (j.contains("max_trace")) b.max_trace = j.at("max_trace").get<std::size_t>();
  return b;
}

json bounds_to_json(const Bounds& b) {
  return json{{"star", b.star}, {"mgc_iterations", b.mgc_iterations}, {"mgc_threads", b.mgc_threads}, {"max_trace", b.max_trace}};
}

StateUniverse universe_from_json(const json& j) {
  StateUniverse u;
  if (j.contains("locs")) u.locs = j.at("locs").get<std::vector<Loc>>();
  if (j.contains("vals")) u.vals = j.at("vals").get<std::vector<Val>>();
  if (j.contains("perms")) {
    u.perms.clear();
    for (const auto& p : j.at("perms")) u.perms.push_back(perm_from_json(p));
  }
  return u;
}

json law_report_to_json(const LawReport& r) {
  json ces = json::array();
  for (const auto& c : r.counterexamples) {
    ces.push_back(json{{"law", c.law}, {"inputs", c.inputs}, {"expected", c.expected}, {"got", c.got}});
  }
  return json{{"passed", r.passed()}, {"cases", r.cases}, {"violations", r.violations}, {"counterexamples", ces}};
}

}  // namespace ownlin
