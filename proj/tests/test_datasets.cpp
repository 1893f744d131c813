#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "graphsvx/datasets.hpp"
#include "graphsvx/errors.hpp"

using namespace graphsvx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphsvx_ds_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool connected(const Graph& g) {
  const auto d = bfs_distances(g, 0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

}  // namespace

TEST(Synthetic, DefaultNodeCounts) {
  EXPECT_EQ(build_synthetic(SyntheticSpec::defaults(DatasetKind::BAShapes)).graphs[0].num_nodes(), 700);
  EXPECT_EQ(build_synthetic(SyntheticSpec::defaults(DatasetKind::BACommunity)).graphs[0].num_nodes(), 1400);
  EXPECT_EQ(build_synthetic(SyntheticSpec::defaults(DatasetKind::TreeCycles)).graphs[0].num_nodes(), 871);
  EXPECT_EQ(build_synthetic(SyntheticSpec::defaults(DatasetKind::TreeGrid)).graphs[0].num_nodes(), 1231);
}

TEST(Synthetic, ReducedBaShapes) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.base_size = 80;
  s.num_motifs = 20;
  const Dataset d = build_synthetic(s);
  const Graph& g = d.graphs[0];
  EXPECT_EQ(g.num_nodes(), 180);
  EXPECT_EQ(d.num_classes, 4);
  EXPECT_FALSE(d.graph_task);
  EXPECT_EQ(d.truth.motif_size, 5);
  ASSERT_EQ(d.truth.motifs.size(), 20u);
  EXPECT_TRUE(connected(g));
  std::map<int, int> label_count;
  for (int l : g.node_labels) ++label_count[l];
  EXPECT_EQ(label_count[0], 80);
  EXPECT_EQ(label_count[1], 20);
  EXPECT_EQ(label_count[2], 40);
  EXPECT_EQ(label_count[3], 40);
}

TEST(Synthetic, HouseMotifStructure) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.base_size = 30;
  s.num_motifs = 5;
  s.perturb_edge_fraction = 0.0;
  const Dataset d = build_synthetic(s);
  const Graph& g = d.graphs[0];
  for (const NodeSet& m : d.truth.motifs) {
    ASSERT_EQ(m.size(), 5u);
    int internal = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i + 1; j < m.size(); ++j) internal += g.has_edge(m[i], m[j]);
      EXPECT_EQ(d.truth.motif_for_node(m[i]), &m);
    }
    EXPECT_EQ(internal, 6);
  }
  EXPECT_EQ(d.truth.motif_for_node(0), nullptr);
}

TEST(Synthetic, TreeCyclesMotifsAreCycles) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::TreeCycles);
  s.base_size = 4;
  s.num_motifs = 6;
  const Dataset d = build_synthetic(s);
  EXPECT_EQ(d.graphs[0].num_nodes(), binary_tree_size(4) + 36);
  for (const NodeSet& m : d.truth.motifs) {
    ASSERT_EQ(m.size(), 6u);
    for (NodeId u : m) {
      int inside = 0;
      for (NodeId w : d.graphs[0].neighbors(u)) inside += std::count(m.begin(), m.end(), w);
      EXPECT_EQ(inside, 2);
    }
  }
}

TEST(Synthetic, TreeGridMotifsAreGrids) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::TreeGrid);
  s.base_size = 3;
  s.num_motifs = 4;
  const Dataset d = build_synthetic(s);
  for (const NodeSet& m : d.truth.motifs) {
    ASSERT_EQ(m.size(), 9u);
    int internal = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i + 1; j < m.size(); ++j) internal += d.graphs[0].has_edge(m[i], m[j]);
    }
    EXPECT_EQ(internal, 12);
  }
}

TEST(Synthetic, BinaryTreeSize) {
  EXPECT_EQ(binary_tree_size(0), 1);
  EXPECT_EQ(binary_tree_size(8), 511);
}

TEST(Synthetic, CommunityHasEightClasses) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BACommunity);
  s.base_size = 40;
  s.num_motifs = 8;
  const Dataset d = build_synthetic(s);
  EXPECT_EQ(d.num_classes, 8);
  EXPECT_EQ(d.graphs[0].num_nodes(), 2 * (40 + 40));
  std::set<int> labels(d.graphs[0].node_labels.begin(), d.graphs[0].node_labels.end());
  EXPECT_EQ(labels.size(), 8u);
}

TEST(Synthetic, TwoMotifsGraphTask) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BA2Motifs);
  s.num_motifs = 10;
  const Dataset d = build_synthetic(s);
  EXPECT_TRUE(d.graph_task);
  ASSERT_EQ(d.graphs.size(), 10u);
  int ones = 0;
  for (const Graph& g : d.graphs) {
    EXPECT_EQ(g.num_nodes(), 25);
    ASSERT_TRUE(g.graph_label);
    ones += *g.graph_label;
  }
  EXPECT_EQ(ones, 5);
}

TEST(Synthetic, SameSeedSameGraph) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.base_size = 50;
  s.num_motifs = 10;
  const Dataset a = build_synthetic(s), b = build_synthetic(s);
  EXPECT_TRUE(structurally_equal(a.graphs[0], b.graphs[0]));
  s.seed = 1;
  EXPECT_FALSE(structurally_equal(a.graphs[0], build_synthetic(s).graphs[0]));
}

TEST(Synthetic, InvalidSpecsRejected) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.num_motifs = 0;
  EXPECT_THROW(build_synthetic(s), InputError);
  s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.base_size = 3;
  EXPECT_THROW(build_synthetic(s), InputError);
  s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.perturb_edge_fraction = 1.5;
  EXPECT_THROW(build_synthetic(s), InputError);
}

TEST(Synthetic, KindNames) {
  for (auto k : {DatasetKind::BAShapes, DatasetKind::BACommunity, DatasetKind::TreeCycles,
                 DatasetKind::TreeGrid, DatasetKind::BA2Motifs}) {
    EXPECT_EQ(parse_dataset_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_dataset_kind("cora"));
}

TEST(Noise, FeatureColumnsAppended) {
  const Graph g = fixtures::random_graph(50, 5, 10, 1);
  const NoisyFeatures nf = add_noisy_features(g, 0.2, GaussianNoise{}, 3);
  EXPECT_EQ(nf.graph.num_features(), 12);
  EXPECT_EQ(nf.noisy_ids, (std::vector<int>{10, 11}));
  EXPECT_EQ(nf.graph.features().leftCols(10), g.features());
  EXPECT_EQ(nf.graph.edges(), g.edges());
}

TEST(Noise, NodesAppendedAndConnected) {
  Graph g = fixtures::random_graph(50, 5, 4, 1);
  g.node_labels.assign(50, 0);
  const NoisyNodes nn = add_noisy_nodes(g, 0.2, 0.001, BernoulliLike{}, 4);
  ASSERT_EQ(nn.noisy_ids.size(), 10u);
  EXPECT_EQ(nn.graph.num_nodes(), 60);
  for (NodeId u : nn.noisy_ids) {
    EXPECT_GE(nn.graph.degree(u), 1);
    EXPECT_EQ(nn.graph.node_labels[u], -1);
  }
}

TEST(TextFormat, RoundTrip) {
  Graph g = fixtures::random_graph(12, 3, 3, 5);
  g.node_labels = fixtures::random_labels(12, 3, 6);
  const fs::path dir = scratch("roundtrip");
  save_graph(g, dir / "g.txt");
  const Graph h = load_graph(dir / "g.txt");
  EXPECT_EQ(h.edges(), g.edges());
  EXPECT_EQ(h.node_labels, g.node_labels);
  EXPECT_NEAR((h.features() - g.features()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(TextFormat, GraphLabelRoundTrip) {
  Graph g = fixtures::random_graph(5, 1, 2, 5);
  g.graph_label = 1;
  const fs::path dir = scratch("graphlabel");
  save_graph(g, dir / "g.txt");
  EXPECT_EQ(load_graph(dir / "g.txt").graph_label, 1);
}

TEST(TextFormat, WrongColumnCount) {
  const fs::path dir = scratch("columns");
  std::ofstream(dir / "g.txt") << "2 2\n1 2\n3\n\n0 1\n";
  EXPECT_THROW(load_graph(dir / "g.txt"), InconsistentDimensions);
}

TEST(TextFormat, EdgeOutOfRangeCarriesLine) {
  const fs::path dir = scratch("edge");
  std::ofstream(dir / "g.txt") << "2 1\n1\n2\n\n0 5\n";
  try {
    load_graph(dir / "g.txt");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(TextFormat, MissingFileIsInputError) {
  EXPECT_THROW(load_graph("/nonexistent/graph.txt"), InputError);
}

TEST(Manifest, WriteAndLoadDataset) {
  SyntheticSpec s = SyntheticSpec::defaults(DatasetKind::BAShapes);
  s.base_size = 30;
  s.num_motifs = 4;
  const Dataset d = build_synthetic(s);
  const fs::path dir = scratch("manifest");
  const fs::path manifest = write_dataset(d, dir, {3}, {});
  const LoadedDataset back = load_dataset(manifest);
  EXPECT_EQ(back.manifest.kind, "ba-shapes");
  EXPECT_EQ(back.manifest.num_classes, 4);
  EXPECT_EQ(back.manifest.noisy_features, (std::vector<int>{3}));
  EXPECT_EQ(back.manifest.truth.motifs, d.truth.motifs);
  EXPECT_EQ(back.manifest.truth.motif_of, d.truth.motif_of);
  ASSERT_EQ(back.graphs.size(), 1u);
  EXPECT_EQ(back.graphs[0].edges(), d.graphs[0].edges());
  EXPECT_EQ(back.graphs[0].node_labels, d.graphs[0].node_labels);

  const nlohmann::json j = manifest_to_json(back.manifest);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(manifest_from_json(j).truth.motifs, d.truth.motifs);
}
