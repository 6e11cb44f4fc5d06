#include "covparse/oracle.h"

#include <functional>
#include <random>
#include <set>

#include "covparse/error.h"
#include "doctest.h"
#include "test_util.h"

namespace covparse {
namespace {

using K = TransitionKind;

Configuration run(int n, const std::vector<Transition>& seq) {
  Configuration c = Configuration::initial(n);
  for (const Transition& t : seq) c = apply(c, t);
  return c;
}

// Can `arc` still be built from `c`? Answered by exhaustive search.
bool brute_reachable(const Configuration& c, const Arc& arc) {
  if (c.head(arc.dep) == arc.head) return true;
  if (c.is_final()) return false;
  for (K k : legal_transitions(c).kinds()) {
    if (brute_reachable(apply(c, Transition{k, is_arc(k) ? "_" : ""}), arc)) return true;
  }
  return false;
}

TEST_CASE("every gold arc is reachable at the initial configuration") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    GoldTree gold = testing::random_tree(1 + static_cast<int>(rng() % 8), rng);
    Configuration c = initial_config(gold.n());
    for (const Arc& a : gold.arcs()) CHECK(arc_reachable(c, a));
    CHECK(loss(c, gold).loss == 0);
  }
}

TEST_CASE("an arc between two words left of the buffer is unreachable") {
  Configuration c = run(3, {Transition::shift(), Transition::shift()});
  REQUIRE(c.lambda1() == std::vector<int>{0, 1, 2});
  REQUIRE(c.beta() == std::vector<int>{3});
  Arc arc{2, "x", 1};
  CHECK_FALSE(brute_reachable(c, arc));
  CHECK_FALSE(arc_reachable(c, arc));
}

TEST_CASE("an arc onto an already headed word is unreachable") {
  Configuration c = apply(initial_config(2), Transition::right_arc("root"));  // 0 -> 1
  Arc arc{2, "x", 1};
  CHECK_FALSE(arc_reachable(c, arc));
  CHECK_FALSE(brute_reachable(c, arc));
}

TEST_CASE("arc_reachable matches exhaustive search on random configurations") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    Configuration c = testing::random_prefix(n, static_cast<int>(rng() % 12), rng);
    for (int d = 1; d <= n; ++d) {
      for (int h = 0; h <= n; ++h) {
        if (h == d) continue;
        Arc arc{h, "x", d};
        CAPTURE(c.debug_string());
        CAPTURE(h);
        CAPTURE(d);
        CHECK(arc_reachable(c, arc) == brute_reachable(c, arc));
      }
    }
  }
}

TEST_CASE("loss after two shifts misses the arcs among lambda1 words") {
  // Both 2 -> 1 and 0 -> 2 join words that have left the buffer.
  GoldTree gold(3, {{2, "a", 1}, {0, "root", 2}, {2, "b", 3}});
  Configuration c = run(3, {Transition::shift(), Transition::shift()});
  CHECK(brute_force_loss(c, gold) == 2);
  LossReport report = loss(c, gold);
  CHECK(report.loss == 2);
  CHECK(report.cycles == 0);
  REQUIRE(report.unreachable.size() == 2);
  CHECK(report.unreachable[0] == Arc{2, "a", 1});
  CHECK(report.unreachable[1] == Arc{0, "root", 2});
}

TEST_CASE("loss counts cycles among buildable arcs") {
  // A = {1 -> 2} dooms the gold root arc 0 -> 2; the buildable gold arcs
  // 2 -> 3 and 3 -> 1 close a cycle with it, so one of them is lost too.
  GoldTree gold(3, {{3, "a", 1}, {0, "root", 2}, {2, "b", 3}});
  Configuration c = run(3, {Transition::shift(), Transition::right_arc("x")});
  LossReport report = loss(c, gold);
  CHECK(report.unreachable.size() == 1);
  CHECK(report.cycles == 1);
  CHECK(report.loss == 2);
  CHECK(brute_force_loss(c, gold) == 2);
}

TEST_CASE("loss decomposition holds on every configuration for n = 3") {
  for (const GoldTree& g : testing::all_trees(3)) {
    BruteForceOracle brute(g);
    std::function<void(const Configuration&)> visit = [&](const Configuration& x) {
      LossReport r = loss(x, g);
      CHECK(r.loss == static_cast<int>(r.unreachable.size()) + r.cycles);
      CHECK(r.loss == brute.loss(x));
      if (x.is_final()) return;
      for (K k : legal_transitions(x).kinds()) visit(apply(x, Transition{k, is_arc(k) ? "_" : ""}));
    };
    visit(initial_config(3));
  }
}

TEST_CASE("final configurations lose exactly the missing gold arcs") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    GoldTree gold = testing::random_tree(n, rng);
    Configuration c = testing::random_prefix(n, 1000, rng);
    REQUIRE(c.is_final());
    int missing = 0;
    for (const Arc& a : gold.arcs()) missing += c.head(a.dep) != a.head;
    CHECK(loss(c, gold).loss == missing);
  }
}

TEST_CASE("loss rejects mismatched sizes") {
  GoldTree gold(2, {{0, "r", 1}, {1, "a", 2}});
  CHECK_THROWS_AS(loss(initial_config(3), gold), InvalidArgument);
}

TEST_CASE("zero-cost transitions at the initial configuration") {
  GoldTree gold(2, {{0, "root", 1}, {1, "a", 2}});
  Configuration c = initial_config(2);
  TransitionSet zero = zero_cost_transitions(c, gold);
  CHECK(zero.contains(K::kRightArc));
  CHECK_FALSE(zero.contains(K::kShift));
  CHECK(loss(apply(c, Transition::shift()), gold).loss == 1);
}

TEST_CASE("SHIFT and NO_ARC are both free when nothing links the focus words") {
  GoldTree gold(3, {{2, "a", 1}, {0, "root", 2}, {2, "b", 3}});
  // Configuration with i = 1, j = 3 and no gold arc between 3 and lambda1.
  Configuration d = run(3, {Transition::shift(), Transition::left_arc("a"),
                            Transition::right_arc("root"), Transition::shift(),
                            Transition::right_arc("b")});
  REQUIRE(d.focus_left() == 1);
  REQUIRE(d.focus_right() == 3);
  TransitionSet zero = zero_cost_transitions(d, gold);
  CHECK(zero.contains(K::kShift));
  CHECK(zero.contains(K::kNoArc));
  CHECK(brute_force_loss(apply(d, Transition::shift()), gold) == 0);
  CHECK(brute_force_loss(apply(d, Transition::no_arc()), gold) == 0);
}

TEST_CASE("zero-cost paths rebuild the gold tree and never lose") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    GoldTree gold = testing::random_tree(n, rng);
    Configuration c = initial_config(n);
    while (!is_final(c)) {
      TransitionSet zero = zero_cost_transitions(c, gold);
      REQUIRE_FALSE(zero.empty());
      auto kinds = zero.kinds();
      K k = kinds[rng() % kinds.size()];
      c = apply(c, Transition{k, oracle_label(c, gold, k)});
      REQUIRE(loss(c, gold).loss == 0);
    }
    CHECK(c.arcs() == gold.arcs());
  }
}

TEST_CASE("static oracle transitions are zero-cost") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    GoldTree gold = testing::random_tree(1 + static_cast<int>(rng() % 9), rng);
    Configuration c = initial_config(gold.n());
    for (const Transition& t : static_oracle(gold)) {
      CHECK(zero_cost_transitions(c, gold).contains(t.kind));
      c = apply(c, t);
    }
  }
}

TEST_CASE("SHIFT can doom several gold arcs at once") {
  // 1, 2 and 3 all depend on 4, which attaches to 0; shifting past 4 loses
  // all four arcs.
  GoldTree gold(4, {{4, "a", 1}, {4, "b", 2}, {4, "c", 3}, {0, "root", 4}});
  Configuration c = run(4, {Transition::shift(), Transition::shift(), Transition::shift()});
  REQUIRE(loss(c, gold).loss == 0);
  CHECK(loss(apply(c, Transition::shift()), gold).loss == 4);
  CHECK(brute_force_loss(apply(c, Transition::shift()), gold) == 4);
}

TEST_CASE("loss is monotone; arc and no-arc moves add at most two") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    GoldTree gold = testing::random_tree(n, rng);
    Configuration c = initial_config(n);
    int previous = 0;
    while (!is_final(c)) {
      auto kinds = legal_transitions(c).kinds();
      for (K k : kinds) {
        int after = loss(apply(c, Transition{k, is_arc(k) ? "_" : ""}), gold).loss;
        CHECK(after >= previous);
        if (k != K::kShift) CHECK(after - previous <= 2);
      }
      K k = kinds[rng() % kinds.size()];
      c = apply(c, Transition{k, is_arc(k) ? "_" : ""});
      previous = loss(c, gold).loss;
    }
  }
}

TEST_CASE("oracle labels") {
  GoldTree gold(3, {{0, "root", 1}, {1, "obj", 2}, {1, "obl", 3}});
  CHECK(oracle_label(initial_config(3), gold, K::kRightArc) == "root");
  // Wrong attachment 0 -> 2: the dependent's gold label is used.
  Configuration c = run(3, {Transition::shift(), Transition::no_arc()});
  REQUIRE(c.focus_left() == 0);
  REQUIRE(c.focus_right() == 2);
  CHECK(oracle_label(c, gold, K::kRightArc) == "obj");
  // LEFT_ARC 2 -> 1 is not gold; 1's gold label is "root".
  Configuration d = run(3, {Transition::shift()});
  CHECK(oracle_label(d, gold, K::kLeftArc) == "root");
  CHECK(oracle_label(d, gold, K::kShift, "punct") == "punct");
}

TEST_CASE("brute force bounds") {
  GoldTree gold(2, {{0, "r", 1}, {1, "a", 2}});
  CHECK(brute_force_loss(initial_config(2), gold) == 0);
  Configuration final_config = run(2, {Transition::shift(), Transition::shift()});
  CHECK(brute_force_loss(final_config, gold) == 2);
  std::mt19937_64 rng(0);
  CHECK_THROWS_AS(BruteForceOracle(testing::random_tree(8, rng)), InvalidArgument);
}

TEST_CASE("loss equals brute force on every reachable configuration, n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    for (const GoldTree& gold : testing::all_trees(n)) {
      BruteForceOracle brute(gold);
      std::set<std::string> seen;
      std::function<void(const Configuration&)> visit = [&](const Configuration& c) {
        if (!seen.insert(c.debug_string()).second) return;
        REQUIRE(loss(c, gold).loss == brute.loss(c));
        if (c.is_final()) return;
        for (K k : legal_transitions(c).kinds()) visit(apply(c, Transition{k, is_arc(k) ? "_" : ""}));
      };
      visit(initial_config(n));
    }
  }
}

TEST_CASE("explore_next") {
  std::mt19937_64 rng(42);
  TransitionSet legal;
  legal.insert(K::kRightArc);
  legal.insert(K::kShift);
  legal.insert(K::kNoArc);
  TransitionSet zero;
  zero.insert(K::kRightArc);
  TransitionScores scores = {0.0, 1.0, 5.0, 0.5};

  ExplorationPolicy off{0.0, 1.0};
  for (int k = 0; k < 20; ++k) CHECK(explore_next(scores, legal, zero, off, rng) == K::kRightArc);

  ExplorationPolicy always{1.0, 1.0};
  CHECK(explore_next(scores, legal, zero, always, rng) == K::kShift);

  // All legal transitions free: plain argmax regardless of p.
  CHECK(explore_next(scores, legal, legal, always, rng) == K::kShift);

  // Wrong transitions far below the best correct one are never explored.
  TransitionScores low = {0.0, 5.0, 1.0, 0.5};
  CHECK(explore_next(low, legal, zero, always, rng) == K::kRightArc);

  CHECK_THROWS_AS(explore_next(scores, legal, TransitionSet{}, always, rng), InvalidArgument);
}

TEST_CASE("explore_next is deterministic for a fixed seed") {
  TransitionSet legal;
  for (K k : kAllTransitionKinds) legal.insert(k);
  TransitionSet zero;
  zero.insert(K::kNoArc);
  TransitionScores scores = {0.2, 0.1, 0.3, 0.25};
  ExplorationPolicy half{0.5, 1.0};
  std::mt19937_64 a(9), b(9);
  int explored = 0;
  for (int k = 0; k < 200; ++k) {
    K x = explore_next(scores, legal, zero, half, a);
    CHECK(x == explore_next(scores, legal, zero, half, b));
    explored += x != K::kNoArc;
  }
  CHECK(explored > 50);
  CHECK(explored < 150);
}

TEST_CASE("best_scoring breaks ties in enum order") {
  TransitionSet all;
  for (K k : kAllTransitionKinds) all.insert(k);
  CHECK(best_scoring({1.0, 1.0, 1.0, 1.0}, all) == K::kLeftArc);
  TransitionSet no_left = all;
  no_left.erase(K::kLeftArc);
  CHECK(best_scoring({1.0, 1.0, 1.0, 1.0}, no_left) == K::kRightArc);
}

}  // namespace
}  // namespace covparse
