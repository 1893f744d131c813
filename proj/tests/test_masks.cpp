#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "graphsvx/errors.hpp"
#include "graphsvx/masks.hpp"

using namespace graphsvx;

namespace {

PlayerIndex players(int b, int d) {
  PlayerIndex p;
  for (int j = 0; j < b; ++j) p.feature_ids.push_back(j);
  for (int i = 0; i < d; ++i) p.node_ids.push_back(100 + i);
  p.target = 0;
  return p;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool contains(const MaskBatch& batch, const CoalitionMask& m) {
  return std::find(batch.masks.begin(), batch.masks.end(), m) != batch.masks.end();
}

CoalitionMask isolated_anchor(int b, int d) {
  CoalitionMask m = CoalitionMask::zeros(b + d);
  for (int i = 0; i < b; ++i) m.z[i] = 1;
  return m;
}

const MaskStrategy kSampled[] = {MaskStrategy::Random, MaskStrategy::Smart, MaskStrategy::SmartSeparate,
                                 MaskStrategy::SmarterSeparate};

}  // namespace

TEST(KernelWeight, ClosedFormValues) {
  EXPECT_NEAR(kernel_weight(4, 1, 1e6), 3.0 / (4.0 * 1.0 * 3.0), 1e-15);
  EXPECT_NEAR(kernel_weight(4, 2, 1e6), 3.0 / (4.0 * 2.0 * 3.0), 1e-15);
  EXPECT_EQ(kernel_weight(4, 0, 1e6), 1e6);
  EXPECT_EQ(kernel_weight(4, 4, 7.0), 7.0);
}

TEST(KernelWeight, MatchesDirectFormulaAndIsSymmetric) {
  for (int m = 2; m <= 30; ++m) {
    for (int s = 1; s < m; ++s) {
      const double direct = (m - 1.0) / (m * s * binom(m - 1, s));
      EXPECT_NEAR(kernel_weight(m, s, 1e6) / direct, 1.0, 1e-10);
      EXPECT_NEAR(kernel_weight(m, s, 1e6) / kernel_weight(m, m - s, 1e6), 1.0, 1e-10);
    }
  }
}

TEST(KernelWeight, LargePlayerCountsStayFinite) {
  const double w = kernel_weight(400, 200, 1e6);
  EXPECT_TRUE(std::isfinite(w));
  EXPECT_GT(w, 0.0);
}

TEST(KernelWeight, InvalidArgumentsThrow) {
  EXPECT_THROW(kernel_weight(0, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(kernel_weight(3, 4, 1.0), std::invalid_argument);
}

TEST(FeatureBudget, ThreeCases) {
  EXPECT_EQ(feature_budget(100, 2, 8, std::nullopt), 35);
  EXPECT_EQ(feature_budget(100, 0, 8, std::nullopt), 0);
  EXPECT_EQ(feature_budget(100, 5, 0, std::nullopt), 100);
  EXPECT_EQ(feature_budget(100, 2, 8, 0.3), 30);
}

TEST(GenMasks, AllEnumeratesEveryCoalition) {
  const MaskBatch batch = gen_masks(players(2, 3), {MaskStrategy::All, 4});
  ASSERT_EQ(batch.size(), 32);
  std::set<CoalitionMask> unique(batch.masks.begin(), batch.masks.end());
  EXPECT_EQ(unique.size(), 32u);
  for (int i = 0; i < batch.size(); ++i) {
    const int s = batch.masks[i].count();
    EXPECT_DOUBLE_EQ(batch.weights[i], kernel_weight(5, s, 1e6));
  }
}

TEST(GenMasks, AllRejectsTooManyPlayers) {
  EXPECT_THROW(gen_masks(players(1, 20), {MaskStrategy::All, 4}), TooManyPlayers);
}

TEST(GenMasks, BudgetTooSmall) {
  MaskOptions o;
  o.num_samples = 3;
  EXPECT_THROW(gen_masks(players(2, 3), o), BudgetTooSmall);
  o.num_samples = 4;
  EXPECT_NO_THROW(gen_masks(players(2, 3), o));
  o.num_samples = 2;
  EXPECT_THROW(gen_masks(players(0, 3), o), BudgetTooSmall);
}

TEST(GenMasks, SampledStrategiesRespectBudgetAndUniqueness) {
  for (MaskStrategy s : kSampled) {
    for (int p : {10, 57, 200}) {
      MaskOptions o;
      o.strategy = s;
      o.num_samples = p;
      o.seed = 3;
      const MaskBatch batch = gen_masks(players(4, 12), o);
      EXPECT_EQ(batch.size(), p) << to_string(s) << " P=" << p;
      std::set<CoalitionMask> unique(batch.masks.begin(), batch.masks.end());
      EXPECT_EQ(unique.size(), batch.masks.size());
      ASSERT_EQ(batch.weights.size(), batch.masks.size());
    }
  }
}

TEST(GenMasks, AnchorsAlwaysPresentWithAnchorWeight) {
  for (MaskStrategy s : kSampled) {
    MaskOptions o;
    o.strategy = s;
    o.num_samples = 20;
    const MaskBatch batch = gen_masks(players(3, 6), o);
    for (const CoalitionMask& anchor : {CoalitionMask::zeros(9), CoalitionMask::ones(9)}) {
      const auto it = std::find(batch.masks.begin(), batch.masks.end(), anchor);
      ASSERT_NE(it, batch.masks.end());
      EXPECT_EQ(batch.weights[it - batch.masks.begin()], 1e6);
    }
    EXPECT_TRUE(contains(batch, isolated_anchor(3, 6))) << to_string(s);
  }
}

TEST(GenMasks, SeparatedMasksVaryOneBlock) {
  for (MaskStrategy s : {MaskStrategy::SmartSeparate, MaskStrategy::SmarterSeparate}) {
    MaskOptions o;
    o.strategy = s;
    o.num_samples = 150;
    const MaskBatch batch = gen_masks(players(5, 9), o);
    int feature_side = 0;
    for (int i = 0; i < batch.size(); ++i) {
      const auto& z = batch.masks[i].z;
      const bool nodes_off = std::all_of(z.begin() + 5, z.end(), [](auto b) { return b == 0; });
      const bool features_on = std::all_of(z.begin(), z.begin() + 5, [](auto b) { return b == 1; });
      EXPECT_TRUE(nodes_off || features_on);
      if (nodes_off && !features_on && batch.masks[i].count() > 0) ++feature_side;
      if (batch.masks[i] == isolated_anchor(5, 9)) {
        EXPECT_EQ(batch.weights[i], 1e6);
      } else if (nodes_off && batch.masks[i].count() > 0) {
        EXPECT_DOUBLE_EQ(batch.weights[i], kernel_weight(5, batch.masks[i].count(), 1e6));
      } else if (features_on && batch.masks[i].count() < 14) {
        EXPECT_DOUBLE_EQ(batch.weights[i], kernel_weight(9, batch.masks[i].count() - 5, 1e6));
      }
    }
    // 2^5 - 2 non-anchor feature masks exist; the feature share wants more.
    EXPECT_EQ(feature_side, 30);
  }
}

TEST(GenMasks, FullKernelScope) {
  MaskOptions o;
  o.strategy = MaskStrategy::SmarterSeparate;
  o.num_samples = 60;
  o.scope = KernelScope::Full;
  const MaskBatch batch = gen_masks(players(3, 8), o);
  for (int i = 0; i < batch.size(); ++i) {
    const int s = batch.masks[i].count();
    if (s == 0 || s == 11 || batch.masks[i] == isolated_anchor(3, 8)) continue;
    EXPECT_DOUBLE_EQ(batch.weights[i], kernel_weight(11, s, 1e6));
  }
}

TEST(GenMasks, SmartExhaustsLowOrdersFirst) {
  // 2 * (1 + 12) = 26 order-0/1 masks fit into 0.9 * 60.
  MaskOptions o;
  o.strategy = MaskStrategy::Smart;
  o.num_samples = 60;
  const MaskBatch batch = gen_masks(players(0, 12), o);
  for (int i = 0; i < 12; ++i) {
    CoalitionMask one = CoalitionMask::zeros(12), all_but = CoalitionMask::ones(12);
    one.z[i] = 1;
    all_but.z[i] = 0;
    EXPECT_TRUE(contains(batch, one));
    EXPECT_TRUE(contains(batch, all_but));
  }
}

TEST(GenMasks, DiversitySpreadsPlayersWhenOrderCannotBeExhausted) {
  // Order 1 needs 60 masks; the budget allows far fewer, so it is sampled.
  MaskOptions o;
  o.strategy = MaskStrategy::SmarterSeparate;
  o.num_samples = 25;
  const MaskBatch batch = gen_masks(players(0, 30), o);
  std::map<int, int> touched;
  int order_one = 0;
  for (const CoalitionMask& m : batch.masks) {
    const int s = m.count();
    if (s != 1 && s != 29) continue;
    ++order_one;
    for (int i = 0; i < 30; ++i) {
      if (m.z[i] == (s == 1 ? 1 : 0)) ++touched[i];
    }
  }
  EXPECT_GE(order_one, 20);
  for (const auto& [player, n] : touched) EXPECT_EQ(n, 1) << "player " << player;
}

TEST(GenMasks, DeterministicUnderSeed) {
  for (MaskStrategy s : kSampled) {
    MaskOptions o;
    o.strategy = s;
    o.num_samples = 80;
    o.seed = 42;
    const MaskBatch a = gen_masks(players(4, 15), o), b = gen_masks(players(4, 15), o);
    EXPECT_EQ(a.masks, b.masks);
    EXPECT_EQ(a.weights, b.weights);
  }
  MaskOptions o;
  o.strategy = MaskStrategy::Random;
  o.num_samples = 80;
  o.seed = 1;
  const MaskBatch a = gen_masks(players(4, 15), o);
  o.seed = 2;
  EXPECT_NE(a.masks, gen_masks(players(4, 15), o).masks);
}

TEST(GenMasks, SmallSpaceIsExhaustedWithoutLooping) {
  MaskOptions o;
  o.strategy = MaskStrategy::Random;
  o.num_samples = 1000;
  const MaskBatch batch = gen_masks(players(1, 3), o);
  EXPECT_EQ(batch.size(), 16);
}

TEST(GenMasks, InvalidOptions) {
  MaskOptions o;
  o.max_order = 0;
  EXPECT_THROW(gen_masks(players(2, 2), o), std::invalid_argument);
  o = MaskOptions{};
  o.feature_share = 1.5;
  EXPECT_THROW(gen_masks(players(2, 2), o), std::invalid_argument);
  o = MaskOptions{};
  o.anchor_weight = 0.0;
  EXPECT_THROW(gen_masks(players(2, 2), o), std::invalid_argument);
}

TEST(StrategyNames, RoundTrip) {
  for (auto s : {MaskStrategy::All, MaskStrategy::Random, MaskStrategy::Smart, MaskStrategy::SmartSeparate,
                 MaskStrategy::SmarterSeparate}) {
    EXPECT_EQ(parse_mask_strategy(to_string(s)), s);
  }
  EXPECT_EQ(parse_mask_strategy("SmarterSeparate"), MaskStrategy::SmarterSeparate);
  EXPECT_FALSE(parse_mask_strategy("greedy"));
}

TEST(ReducePlayers, NodesAreLHopNeighbours) {
  const Graph g = fixtures::path_graph(7, 1);
  const GnnModel m = fixtures::random_model(1, 2, 3, 2, 0);
  const PlayerIndex p = reduce_players(g, m, 3, 1.0);
  EXPECT_EQ(p.node_ids, (NodeSet{1, 2, 4, 5}));
  EXPECT_TRUE(p.feature_ids.empty());  // constant feature
  EXPECT_EQ(p.target, 3);
}

TEST(ReducePlayers, FeatureBand) {
  DenseMatrix x(4, 2);
  // column 0: mean 0, sd 1; column 1: mean 0, sd 2
  x << 1, 2, -1, -2, 1, 2, -1, -2;
  x(0, 0) = 1.0;
  Graph g(4, {{0, 1}, {1, 2}, {2, 3}}, x);
  const GnnModel m = fixtures::random_model(2, 1, 3, 2, 0);
  EXPECT_TRUE(reduce_players(g, m, 0, 1.0).feature_ids.empty());  // on the band edge
  EXPECT_EQ(reduce_players(g, m, 0, 0.5).feature_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(reduce_players(g, m, 0, 0.0).feature_ids, (std::vector<int>{0, 1}));
}

TEST(ReducePlayers, EmptySetThrows) {
  Graph g(2, {}, DenseMatrix::Ones(2, 1));
  const GnnModel m = fixtures::random_model(1, 2, 3, 2, 0);
  EXPECT_THROW(reduce_players(g, m, 0, 1.0), EmptyPlayerSet);
}

TEST(FeatureMoments, PopulationStandardDeviation) {
  DenseMatrix x(2, 1);
  x << 1, 3;
  const FeatureMoments mom = feature_moments(Graph(2, {}, x));
  EXPECT_DOUBLE_EQ(mom.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(mom.sd[0], 1.0);
}

TEST(PlayerIndex, Validation) {
  PlayerIndex p = players(1, 2);
  EXPECT_NO_THROW(p.validate());
  p.node_ids.push_back(0);
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(PlayerIndex{}.validate(), EmptyPlayerSet);
}
