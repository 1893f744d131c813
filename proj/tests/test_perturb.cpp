#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "graphsvx/errors.hpp"
#include "graphsvx/perturb.hpp"

using namespace graphsvx;

namespace {

// Path 0-1-2-3-4 with distinct feature rows (i, 10 i).
Graph numbered_path() {
  DenseMatrix x(5, 2);
  for (int i = 0; i < 5; ++i) {
    x(i, 0) = i;
    x(i, 1) = 10.0 * i;
  }
  Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, x);
  return g;
}

PlayerIndex path_players() {
  PlayerIndex p;
  p.feature_ids = {0, 1};
  p.node_ids = {1, 2, 3};
  p.target = 0;
  return p;
}

CoalitionMask mask(std::initializer_list<int> bits) {
  return CoalitionMask(std::vector<std::uint8_t>(bits.begin(), bits.end()));
}

}  // namespace

TEST(GenPerturbed, ExcludedFeatureTakesBaseline) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  const Graph out = gen_perturbed(g, path_players(), mask({0, 1, 1, 1, 1}), cfg);
  EXPECT_DOUBLE_EQ(out.features()(0, 0), 2.0);  // mean of 0..4
  EXPECT_DOUBLE_EQ(out.features()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(out.features()(1, 0), 1.0);  // other rows untouched
  EXPECT_EQ(out.edges(), g.edges());
}

TEST(GenPerturbed, ExcludedNodesAreIsolated) {
  const Graph g = numbered_path();
  const PerturbConfig cfg = PerturbConfig::for_graph(g);
  const Graph out = gen_perturbed(g, path_players(), mask({1, 1, 1, 0, 1}), cfg);
  EXPECT_TRUE(out.has_edge(0, 1));
  EXPECT_FALSE(out.has_edge(1, 2));
  EXPECT_FALSE(out.has_edge(2, 3));
  EXPECT_TRUE(out.has_edge(3, 4));  // node 4 is not a player
  EXPECT_EQ(out.features(), g.features());
}

TEST(GenPerturbed, AllOnesIsIdentity) {
  const Graph g = numbered_path();
  const Graph out = gen_perturbed(g, path_players(), CoalitionMask::ones(5), PerturbConfig::for_graph(g));
  EXPECT_TRUE(structurally_equal(out, g));
}

TEST(GenPerturbed, ContrastiveUsesReferenceRow) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.mode = PerturbMode::Contrastive;
  cfg.contrast = g.features().row(4).transpose();
  const Graph out = gen_perturbed(g, path_players(), mask({0, 1, 1, 1, 1}), cfg);
  EXPECT_DOUBLE_EQ(out.features()(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(out.features()(0, 1), 0.0);
}

TEST(GenPerturbed, GlobalSubgraphResetsReceptiveField) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.mode = PerturbMode::GlobalSubgraphFeatures;
  cfg.mc_mean = Vector::Constant(2, -1.0);
  cfg.feature_rows = {1, 2};
  PlayerIndex p;
  p.feature_ids = {0, 1};
  p.target = 0;
  const Graph out = gen_perturbed(g, p, mask({1, 0}), cfg);
  EXPECT_DOUBLE_EQ(out.features()(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(out.features()(2, 1), -1.0);
  EXPECT_DOUBLE_EQ(out.features()(3, 1), 30.0);
  EXPECT_DOUBLE_EQ(out.features()(2, 0), 2.0);
}

TEST(GenPerturbed, GraphTaskResetsWholeColumn) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.mode = PerturbMode::GraphTask;
  PlayerIndex p;
  p.feature_ids = {1};
  const Graph out = gen_perturbed(g, p, mask({0}), cfg);
  EXPECT_TRUE(out.features().col(1).isConstant(20.0));
  EXPECT_EQ(out.features().col(0), g.features().col(0));
}

TEST(GenPerturbed, GlobalNodeSetResetsOnlyU) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.mode = PerturbMode::GlobalNodeSet;
  cfg.global_nodes = {1, 3};
  PlayerIndex p;
  p.feature_ids = {0};
  const Graph out = gen_perturbed(g, p, mask({0}), cfg);
  EXPECT_DOUBLE_EQ(out.features()(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(out.features()(3, 0), 2.0);
  EXPECT_DOUBLE_EQ(out.features()(4, 0), 4.0);
}

TEST(GenPerturbed, MaskLengthMismatch) {
  const Graph g = numbered_path();
  EXPECT_THROW(gen_perturbed(g, path_players(), mask({1, 1}), PerturbConfig::for_graph(g)),
               DimensionMismatch);
}

TEST(IndirectEffect, RestoresPathWithNeutralIntermediates) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.indirect_effect = true;
  cfg.mc_mean = Vector::Constant(2, 7.0);
  const Graph out = perturb(g, path_players(), mask({1, 1, 0, 0, 1}), cfg);
  EXPECT_TRUE(out.has_edge(0, 1));
  EXPECT_TRUE(out.has_edge(1, 2));
  EXPECT_TRUE(out.has_edge(2, 3));
  EXPECT_EQ(out.features().row(1), Vector::Constant(2, 7.0).transpose());
  EXPECT_EQ(out.features().row(2), Vector::Constant(2, 7.0).transpose());
  EXPECT_EQ(out.features().row(3), g.features().row(3));
}

TEST(IndirectEffect, IncludedIntermediatesKeepFeatures) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.indirect_effect = true;
  cfg.mc_mean = Vector::Constant(2, 7.0);
  const Graph out = perturb(g, path_players(), mask({1, 1, 0, 1, 1}), cfg);
  EXPECT_EQ(out.features().row(1), Vector::Constant(2, 7.0).transpose());
  EXPECT_EQ(out.features().row(2), g.features().row(2));
}

TEST(IndirectEffect, ExplainedNodeFill) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.indirect_effect = true;
  cfg.path_fill = PathNodeFill::ExplainedNode;
  const Graph out = perturb(g, path_players(), mask({1, 1, 0, 1, 0}), cfg);
  EXPECT_EQ(out.features().row(1), g.features().row(0));
  EXPECT_FALSE(out.has_edge(2, 3));  // node 3 is excluded
}

TEST(IndirectEffect, NoOpWhenConnected) {
  const Graph g = numbered_path();
  PerturbConfig cfg = PerturbConfig::for_graph(g);
  cfg.indirect_effect = true;
  const CoalitionMask m = mask({0, 1, 1, 1, 0});
  EXPECT_TRUE(structurally_equal(perturb(g, path_players(), m, cfg),
                                 gen_perturbed(g, path_players(), m, cfg)));
}

TEST(MonteCarloMean, SeededAndUnbiased) {
  const Graph g = numbered_path();
  const Vector a = monte_carlo_mean(g, 100, 5), b = monte_carlo_mean(g, 100, 5);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(monte_carlo_mean(g, 200000, 1)[0], 2.0, 0.02);
}

TEST(EvalSamples, ResultsIndependentOfJobs) {
  const Graph g = fixtures::random_graph(25, 8, 3, 4);
  const GnnModel model = fixtures::random_model(3, 2, 6, 3, 5);
  const PlayerIndex players = reduce_players(g, model, 0, 0.5);
  MaskOptions mo;
  mo.num_samples = 40;
  const MaskBatch batch = gen_masks(players, mo);
  const PerturbConfig cfg = PerturbConfig::for_graph(g);
  const auto a = eval_samples(g, players, batch, model, cfg, 1);
  const auto b = eval_samples(g, players, batch, model, cfg, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].target_score, b[i].target_score);
    EXPECT_EQ(a[i].mask, batch.masks[i]);
  }
}

TEST(EvalSamples, ScoreIsPredictedClassProbability) {
  const Graph g = fixtures::random_graph(10, 3, 3, 4);
  const GnnModel model = fixtures::random_model(3, 2, 6, 3, 5);
  const PlayerIndex players = reduce_players(g, model, 2, 0.5);
  const PerturbConfig cfg = PerturbConfig::for_graph(g);
  const TargetClasses t = target_classes(g, players, model, cfg);
  const DenseMatrix probs = gcn_forward(model, g);
  Eigen::Index best;
  probs.row(2).maxCoeff(&best);
  EXPECT_EQ(t.classes[0], best);
  const PerturbSample s = score_graph(g, CoalitionMask::ones(players.size()), model, t);
  EXPECT_DOUBLE_EQ(s.target_score, probs(2, best));
}
