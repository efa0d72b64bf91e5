#include "ownlin/fixtures.hpp"

namespace ownlin::fixtures {

namespace {

Command prim(PrimCommand c) { return Command::of(std::move(c)); }
Expr at(Loc l) { return Expr::deref(Expr::lit(l)); }
Command store(Loc l, Expr v) { return prim(PrimCommand::store(Expr::lit(l), std::move(v))); }

ParamPredicate both(std::set<State> members) {
  ParamPredicate p;
  for (ThreadId t : {1, 2}) p.by_thread[t] = Predicate(AlgebraId::ram, members);
  return p;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

// A primitive over the scratch cells, and over cell 10 when owned.
Command random_op(std::mt19937_64& rng, bool owns_cell) {
  const std::size_t kinds = owns_cell ? 7 : 5;
  switch (pick(rng, kinds)) {
    case 0: return store(5 + static_cast<Loc>(pick(rng, 2)), Expr::lit(static_cast<Val>(pick(rng, 2))));
    case 1: return store(6, at(5));
    case 2: return prim(PrimCommand::assume(pick(rng, 2) ? at(5) : Expr::not_(at(5))));
    case 3: return store(5, Expr::not_(at(6)));
    case 4: return prim(PrimCommand::skip());
    case 5: return store(10, at(5));
    default: return store(5, at(10));
  }
}

Command random_block(std::mt19937_64& rng, bool owns_cell, int depth) {
  switch (depth > 0 ? pick(rng, 5) : 0) {
    case 0: return random_op(rng, owns_cell);
    case 1: return Command::seq({random_block(rng, owns_cell, depth - 1), random_block(rng, owns_cell, depth - 1)});
    case 2: return Command::choice({random_block(rng, owns_cell, depth - 1), random_block(rng, owns_cell, depth - 1)});
    case 3: return Command::star(random_op(rng, owns_cell));
    default: return prim(PrimCommand::atomic(Command::seq({random_op(rng, owns_cell), random_op(rng, owns_cell)})));
  }
}

Command maybe_block(std::mt19937_64& rng, bool owns_cell) {
  return pick(rng, 3) == 0 ? prim(PrimCommand::skip()) : random_block(rng, owns_cell, 1);
}

Command unroll(const Command& c, int star) {
  switch (c.kind) {
    case Command::Kind::prim:
    case Command::Kind::call: return c;
    case Command::Kind::seq:
    case Command::Kind::choice: {
      std::vector<Command> kids;
      for (const auto& k : c.kids) kids.push_back(unroll(k, star));
      return c.kind == Command::Kind::seq ? Command::seq(std::move(kids)) : Command::choice(std::move(kids));
    }
    case Command::Kind::star: {
      Command body = unroll(c.kids.at(0), star);
      std::vector<Command> alts{prim(PrimCommand::skip())};
      std::vector<Command> run;
      for (int i = 0; i < star; ++i) {
        run.push_back(body);
        alts.push_back(Command::seq(run));
      }
      return Command::choice(std::move(alts));
    }
  }
  return c;
}

}  // namespace

Spec buffer_spec() {
  std::set<State> cell{State::ram({{10, 0}}), State::ram({{10, 1}})};
  std::set<State> none{State{}};
  return Spec{
      {"put", MethodSpec{both(cell), both(none)}},
      {"get", MethodSpec{both(none), both(cell)}},
      {"op", MethodSpec{both(none), both(none)}},
  };
}

State buffer_init() { return State::ram({{4, 0}, {5, 0}, {6, 0}}); }

Library random_buffer_library(std::mt19937_64& rng) {
  auto flag_is = [](bool v) { return prim(PrimCommand::assume(v ? at(4) : Expr::not_(at(4)))); };
  Library lib;
  // The library owns cell 10 exactly while the flag is set or a put/get is
  // between its call and its atomic step, so cell 10 is touched only then.
  lib.methods["put"] = Command::seq({maybe_block(rng, true),
                                     prim(PrimCommand::atomic(Command::seq(
                                         {flag_is(false), store(4, Expr::lit(1)), random_op(rng, true)}))),
                                     maybe_block(rng, false)});
  lib.methods["get"] = Command::seq({maybe_block(rng, false),
                                     prim(PrimCommand::atomic(Command::seq(
                                         {flag_is(true), random_op(rng, true), store(4, Expr::lit(0))}))),
                                     maybe_block(rng, true)});
  lib.methods["op"] = random_block(rng, false, 2);
  return lib;
}

Library atomized(const Library& lib, int star) {
  Library out;
  for (const auto& [m, body] : lib.methods) out.methods[m] = prim(PrimCommand::atomic(unroll(body, star)));
  return out;
}

Bounds small_bounds() { return Bounds{1, 2, 2, 8}; }

}  // namespace ownlin::fixtures
