#include <doctest.h>

#include "ownlin/history.hpp"
#include "support.hpp"

using namespace ownlin;
using namespace ownlin::testing;

namespace {
State cell10() { return State::ram({{10, 0}}); }
const Footprint kEmpty(AlgebraId::ram);
}  // namespace

TEST_CASE("well-formedness") {
  CHECK(check_well_formed({}));
  CHECK(check_well_formed({call(1, "m"), ret(1, "m")}));
  CHECK_FALSE(check_well_formed({ret(1, "m")}));
  CHECK_FALSE(check_well_formed({call(1, "m"), ret(1, "n")}));
  CHECK_FALSE(check_well_formed({call(1, "m"), call(1, "m")}));
  CHECK(check_well_formed({call(1, "m"), call(2, "n"), ret(1, "m")}));
}

TEST_CASE("footprint evaluation") {
  CHECK(evaluate_footprint({}, Footprint::ram({4})) == Footprint::ram({4}));
  History twice{call(1, "m", cell10()), call(2, "n", cell10())};
  CHECK_FALSE(evaluate_footprint(twice, kEmpty).has_value());
  CHECK_FALSE(is_balanced(twice, kEmpty));
  History back{call(1, "m", cell10()), ret(1, "m", cell10()), call(2, "n", cell10())};
  // by hand: {} o {10} = {10}; {10} \\ {10} = {}; {} o {10} = {10}
  CHECK(evaluate_footprint(back, kEmpty) == Footprint::ram({10}));
  CHECK(is_balanced(back, kEmpty));
  CHECK(is_balanced({}, Footprint::ram({1})));
}

TEST_CASE("footprint evaluation composes over concatenation") {
  std::mt19937_64 rng(7);
  std::vector<State> pieces{State(AlgebraId::ram), State::ram({{1, 0}}), State::ram({{2, 0}})};
  for (int n = 0; n < 300; ++n) {
    auto h = random_history(6, 2, {"a", "b"}, rng);
    for (auto& a : h) a.state = pieces[rng() % pieces.size()];
    std::size_t cut = rng() % (h.size() + 1);
    History h1(h.begin(), h.begin() + cut), h2(h.begin() + cut, h.end());
    auto whole = evaluate_footprint(h, kEmpty);
    auto mid = evaluate_footprint(h1, kEmpty);
    auto parts = mid ? evaluate_footprint(h2, *mid) : std::nullopt;
    CHECK(whole == parts);
  }
}

TEST_CASE("is_sequential") {
  CHECK(is_sequential({}));
  CHECK(is_sequential({call(1, "m"), ret(1, "m")}));
  CHECK_FALSE(is_sequential({call(1, "m"), call(2, "n"), ret(1, "m")}));
}

TEST_CASE("linearized_by examples") {
  State s = State::ram({{1, 0}}), s1 = State::ram({{2, 0}}), s2 = State::ram({{3, 0}});
  History h{call(1, "a", s), call(2, "b", s1), ret(1, "a", s2)};
  History h2{call(1, "a", s), ret(1, "a", s2), call(2, "b", s1)};
  CHECK(linearized_by_bruteforce(h, h2));
  auto w = linearized_by(h, h2);
  REQUIRE(w.has_value());
  CHECK(is_lin_witness(h, h2, *w));
  CHECK(*w == LinWitness{0, 2, 1});

  History g{call(1, "a", s), ret(1, "a", s1), call(2, "b", s2)};
  History g2{call(1, "a", s), call(2, "b", s2), ret(1, "a", s1)};
  CHECK_FALSE(linearized_by_bruteforce(g, g2));
  CHECK_FALSE(linearized_by(g, g2).has_value());

  for (const auto& x : {h, h2, g, g2}) {
    auto id = linearized_by(x, x);
    REQUIRE(id.has_value());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK((*id)[i] == i);
  }
}

TEST_CASE("balanced_linearized_by") {
  History h{call(1, "m"), ret(1, "m")};
  BalancedHistory a{Footprint::ram({1}), h};
  CHECK(balanced_linearized_by(a, a));
  CHECK_FALSE(balanced_linearized_by(a, BalancedHistory{Footprint::ram({1, 2}), h}));
  CHECK(balanced_linearized_by(a, BalancedHistory{kEmpty, h}));
}

TEST_CASE("interface set ordering") {
  History h{call(1, "m"), ret(1, "m")};
  InterfaceSet a{{kEmpty, h}};
  CHECK(interface_set_leq_bool({}, a));
  CHECK(interface_set_leq_bool(a, a));
  InterfaceSet other{{kEmpty, History{call(1, "n"), ret(1, "n")}}};
  auto r = interface_set_leq(a, other, true);
  CHECK_FALSE(r.holds);
  REQUIRE(r.failing.has_value());
  CHECK(r.failing->history == h);
  CHECK(r.entries.size() == 1);
}

TEST_CASE("search agrees with brute force on short histories") {
  auto all = all_histories(5, 2, {"a", "b"});
  for (const auto& h : all) {
    for (const auto& h2 : reorderings(h)) {
      bool brute = linearized_by_bruteforce(h, h2);
      auto w = linearized_by(h, h2);
      REQUIRE(brute == w.has_value());
      if (w) CHECK(is_lin_witness(h, h2, *w));
    }
  }
}

TEST_CASE("linearized_by is transitive and implies equal projections") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 300; ++n) {
    auto h = random_history(6, 2, {"a", "b"}, rng);
    auto h2 = random_reordering(h, rng);
    auto h3 = random_reordering(h2, rng);
    if (linearized_by(h, h2) && linearized_by(h2, h3)) CHECK(linearized_by(h, h3).has_value());
    if (linearized_by(h, h2)) {
      for (ThreadId t : {1, 2}) CHECK(project_thread(h, t) == project_thread(h2, t));
    }
  }
}
