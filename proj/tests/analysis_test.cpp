#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "test_util.hpp"

using namespace gcb;
using namespace gcb::testing;

namespace {

const balance_params p72 = derive_constants(0.72, 0.5);

}  // namespace

TEST(Validate, EmptyAndSingleton) {
  EXPECT_TRUE(validate<ikey>(nullptr, p72).ok());
  const ptr l = leaf();
  EXPECT_TRUE(validate(l.get(), p72).ok());
}

TEST(Validate, SpineIsChildUnbalanced) {
  std::vector<ikey> keys(20);
  std::iota(keys.begin(), keys.end(), 1);
  const ptr spine = naive_bst(keys);
  const auto r = validate(spine.get(), p72);
  EXPECT_FALSE(r.ok());
  EXPECT_GT(r.count(violation_kind::child), 0u);
  EXPECT_EQ(r.count(violation_kind::order), 0u);
  EXPECT_EQ(r.count(violation_kind::weight_mismatch), 0u);
}

TEST(Validate, DetectsStaleWeightAndBadOrder) {
  ptr t = build_perfect(std::vector<ikey>{1, 2, 3, 4, 5, 6, 7});
  t->left->weight = 5;
  t->right->key = 0;
  const auto r = validate(t.get(), p72);
  EXPECT_EQ(r.count(violation_kind::weight_mismatch), 1u);
  EXPECT_GE(r.count(violation_kind::order), 1u);
  EXPECT_EQ(r.hard_count(), r.violations.size());
}

TEST(Validate, WorstCaseTreesAreBalanced) {
  for (std::uint64_t s = 1; s <= 3000; ++s) {
    const ptr t = worst_case_tree<ikey>(s, 0.72, 0.5);
    ASSERT_TRUE(validate(t.get(), p72).ok()) << s;
  }
}

TEST(ValidateRobust, Examples) {
  // Weight 100 with children of weight 60 and 40 and even grandchildren.
  const ptr a = relabel(join(join(perfect(29), perfect(29)), join(perfect(19), perfect(19))));
  ASSERT_EQ(a->weight, 100u);
  EXPECT_TRUE(validate_robust(*a, 0.72, 0.5));
  // Weight 16 with a child of weight 11: 11 + 1 > 0.7 * 17.
  const ptr b = relabel(join(perfect(10), perfect(4)));
  ASSERT_EQ(b->weight, 16u);
  EXPECT_FALSE(validate_robust(*b, 0.7, 0.5));
  EXPECT_TRUE(validate_robust(*relabel(perfect(15)), 0.72, 0.5));
}

TEST(ValidateRobust, MatchesOffsetForm) {
  // With dyadic parameters both forms are computed exactly.
  const double a = 23.0 / 32.0;
  const double b = 0.5;
  std::mt19937_64 rng(41);
  std::size_t checked = 0;
  for (int round = 0; round < 200; ++round) {
    std::vector<ikey> keys(1 + rng() % 60);
    std::iota(keys.begin(), keys.end(), 0);
    std::shuffle(keys.begin(), keys.end(), rng);
    const ptr t = naive_bst(keys);
    std::vector<const node<ikey>*> stack{t.get()};
    while (!stack.empty()) {
      const node<ikey>* n = stack.back();
      stack.pop_back();
      const double w = double(n->weight);
      const double c = double(std::max(node_weight(n->left), node_weight(n->right)));
      const auto g = grandchild_weights(*n);
      const double gm = *std::max_element(g.begin(), g.end());
      const bool offset = c <= a * w + robustness_offset(a) && gm <= b * w + robustness_offset(b);
      EXPECT_EQ(validate_robust(*n, a, b), offset);
      ++checked;
      if (n->left) stack.push_back(n->left.get());
      if (n->right) stack.push_back(n->right.get());
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(ValidateRobust, ReportedOnlyOnRequest) {
  const ptr b = relabel(join(perfect(10), perfect(4)));
  const balance_params p = derive_constants(0.72, 0.5);
  // At the root 11 > 0.72 * 15 fails robustness while 11 <= 0.72 * 16 is plain-balanced.
  EXPECT_EQ(validate(b.get(), p, false).count(violation_kind::robust_child), 0u);
  const auto r = validate(b.get(), p, true);
  EXPECT_GE(r.count(violation_kind::robust_child), 1u);
  EXPECT_TRUE(std::any_of(r.violations.begin(), r.violations.end(), [&](const auto& v) {
    return v.key == b->key && v.kind == violation_kind::robust_child;
  }));
  EXPECT_EQ(r.hard_count(), 0u);
}

TEST(Stats, PerfectSevenNodes) {
  const ptr t = relabel(perfect(7));
  const tree_stats s = compute_stats(t.get());
  EXPECT_EQ(s.n_nodes, 7u);
  EXPECT_EQ(s.height, 2);
  EXPECT_EQ(s.internal_path_length, 10u);
  EXPECT_EQ(s.external_path_length, 24u);
}

TEST(Stats, EmptyTree) {
  const tree_stats s = compute_stats<ikey>(nullptr);
  EXPECT_EQ(s.n_nodes, 0u);
  EXPECT_EQ(s.height, -1);
  EXPECT_EQ(s.external_path_length, 0u);
}

TEST(Stats, PathLengthsMatchDepthSums) {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 100; ++round) {
    std::vector<ikey> keys(1 + rng() % 300);
    std::iota(keys.begin(), keys.end(), 0);
    std::shuffle(keys.begin(), keys.end(), rng);
    const ptr t = naive_bst(keys);
    const tree_stats s = compute_stats(t.get());
    EXPECT_EQ(std::int64_t(s.external_path_length), depth_sum_external(t.get(), 0));
    EXPECT_EQ(std::int64_t(s.internal_path_length), depth_sum_internal(t.get(), 0));
    EXPECT_EQ(s.external_path_length, s.internal_path_length + 2 * s.n_nodes);
  }
}

TEST(WorstCase, SmallShapes) {
  const ptr t4 = worst_case_tree<ikey>(4, 0.72, 0.5);
  EXPECT_EQ(t4->left->weight, 2u);
  EXPECT_EQ(t4->right->weight, 2u);
  const ptr t5 = worst_case_tree<ikey>(5, 0.72, 0.5);
  EXPECT_EQ(t5->left->weight, 2u);
  EXPECT_EQ(t5->right->weight, 3u);
  EXPECT_EQ(node_weight(t5->right->left), 2u);
  EXPECT_EQ(node_weight(t5->right->right), 1u);
  const ptr t6 = worst_case_tree<ikey>(6, 0.72, 0.5);
  EXPECT_EQ(t6->right->weight, 4u);
  EXPECT_EQ(compute_stats(t6.get()).height, 2);
  EXPECT_EQ(worst_case_tree<ikey>(1, 0.72, 0.5), nullptr);
  std::vector<ikey> keys;
  in_order(t6.get(), keys);
  EXPECT_EQ(keys, (std::vector<ikey>{1, 2, 3, 4, 5}));
}

// Frozen from tests/oracle/derive.py.
TEST(WorstCase, FrozenValues) {
  struct row {
    std::uint64_t s;
    std::int64_t height;
    std::uint64_t path;
    std::uint64_t min_path;
  };
  for (const row r : {row{100, 10, 728, 672}, row{1000, 16, 11057, 9976},
                      row{10000, 23, 148771, 133616}, row{100000, 29, 1869307, 1668928}}) {
    const ptr t = worst_case_tree<ikey>(r.s, 0.72, 0.5);
    const tree_stats st = compute_stats(t.get());
    EXPECT_EQ(st.height, r.height) << r.s;
    EXPECT_EQ(st.external_path_length, r.path) << r.s;
    EXPECT_EQ(min_external_path(r.s), r.min_path) << r.s;
    const double ls = std::log2(double(r.s));
    EXPECT_GE(double(st.height), -2.0 * ls / std::log2(0.5) - 7.0);
    EXPECT_GE(double(st.external_path_length),
              double(r.s) * ls / path_length_entropy(0.72, 0.5) - 4.0 * double(r.s - 1));
  }
}

TEST(WorstCase, RequiresDoublePrimeDomain) {
  EXPECT_THROW(worst_case_tree<ikey>(100, 0.72, 0.52), domain_error);
  EXPECT_THROW(worst_case_tree<ikey>(100, 0.76, 0.55), domain_error);
  EXPECT_THROW(worst_case_tree<ikey>(0, 0.72, 0.5), precondition_error);
}

TEST(MinExternalPath, SmallValues) {
  const std::vector<std::uint64_t> expected{0, 2, 5, 8, 12, 16, 20, 24, 29, 34, 39, 44, 49, 54, 59, 64};
  for (std::uint64_t s = 1; s <= 16; ++s) EXPECT_EQ(min_external_path(s), expected[s - 1]) << s;
  EXPECT_THROW(min_external_path(0), precondition_error);
}

TEST(MinExternalPath, PerfectTreesAttainIt) {
  for (std::size_t n = 0; n <= 300; ++n) {
    std::vector<ikey> keys(n);
    std::iota(keys.begin(), keys.end(), 0);
    const ptr t = build_perfect(keys);
    EXPECT_EQ(compute_stats(t.get()).external_path_length, min_external_path(n + 1)) << n;
  }
}

TEST(PotentialTracker, CounterRules) {
  potential_tracker pt;
  int a = 0;
  int b = 0;
  pt.created(&a);
  pt.created(&b);
  pt.descendant_changed(&a, 4);
  pt.descendant_changed(&a, 8);
  EXPECT_DOUBLE_EQ(pt.value(&a), 0.75);
  pt.descendant_changed(&b, 2);
  EXPECT_DOUBLE_EQ(pt.total(), 1.75);
  pt.affected(&a);
  EXPECT_EQ(pt.value(&a), 0.0);
  EXPECT_DOUBLE_EQ(pt.total(), 1.0);
  pt.removed(&b);
  EXPECT_DOUBLE_EQ(pt.total(), 0.0);
  EXPECT_EQ(pt.tracked(), 1u);
  EXPECT_DOUBLE_EQ(pt.recompute(), pt.total());
  EXPECT_GE(pt.lowest_written(), 0.0);
  pt.reset();
  EXPECT_EQ(pt.tracked(), 0u);
}

TEST(PotentialObserver, FlagsOversizedUpdate) {
  potential_observer po(p72);
  std::vector<int> ids(20);
  std::vector<path_entry> path;
  for (int& i : ids) path.push_back({&i, 2});  // each ancestor gains 2 / 2 = 1
  po.on_update_begin(update_kind::insert, 100);
  po.on_leaf_change(update_kind::insert, path, nullptr, nullptr);
  po.on_update_end(true);
  EXPECT_FALSE(po.ok());
  EXPECT_DOUBLE_EQ(po.max_update_delta, 20.0);
}

TEST(PotentialObserver, BottomUpAndTopDownRespectBounds) {
  for (bool td : {false, true}) {
    tree<ikey> t(p72);
    potential_observer po(p72);
    t.attach(&po);
    for (ikey k = 1; k <= 20000; ++k) td ? t.insert_td(k) : t.insert_bu(k);
    for (ikey k = 1; k <= 20000; k += 3) td ? t.erase_td(k) : t.erase_bu(k);
    EXPECT_TRUE(po.ok()) << (po.failures.empty() ? "" : po.failures.front());
    EXPECT_LE(po.max_update_delta, 16.0 + 1e-9);
    EXPECT_GT(po.rotating_calls, 0u);
    EXPECT_NEAR(po.tracker.recompute(), po.tracker.total(), 1e-6);
    EXPECT_EQ(po.large_call_threshold(), 939u);
  }
}

TEST(PotentialObserver, DegenerateParametersSkipLargeCallCheck) {
  const balance_params p = derive_constants(inv_sqrt2, scriptB(inv_sqrt2));
  potential_observer po(p);
  tree<ikey> t(p);
  t.attach(&po);
  for (ikey k = 1; k <= 5000; ++k) t.insert_bu(k);
  EXPECT_EQ(po.large_calls, 0u);
  EXPECT_TRUE(po.ok());
}

TEST(StatsOfTree, CarriesRotationsAndPotential) {
  tree<ikey> t(p72);
  potential_observer po(p72);
  t.attach(&po);
  for (ikey k = 1; k <= 1000; ++k) t.insert_bu(k);
  const tree_stats s = compute_stats(t, &po.tracker);
  EXPECT_EQ(s.rotations_simple + 2 * s.rotations_double, t.counters().total);
  EXPECT_GT(s.rotations_simple + s.rotations_double, 0u);
  EXPECT_DOUBLE_EQ(s.potential_sum, po.tracker.total());
  EXPECT_EQ(s.n_nodes, 1000u);
}
