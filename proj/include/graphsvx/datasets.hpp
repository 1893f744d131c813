#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "graphsvx/graph.hpp"

namespace graphsvx {

enum class DatasetKind { BAShapes, BACommunity, TreeCycles, TreeGrid, BA2Motifs };

std::string to_string(DatasetKind kind);
std::optional<DatasetKind> parse_dataset_kind(const std::string& name);

struct SyntheticSpec {
  DatasetKind kind = DatasetKind::BAShapes;
  int base_size = 300;     // BA nodes, or binary-tree depth for Tree-* kinds
  int num_motifs = 80;     // motifs per graph; number of graphs for BA-2motifs
  double perturb_edge_fraction = 0.1;
  int ba_attach = 5;
  int num_features = 10;
  std::uint64_t seed = 0;

  /// Defaults for each kind, sized after the reference benchmarks.
  static SyntheticSpec defaults(DatasetKind kind);
  void validate() const;
};

// Motif membership. For node datasets `motif_of` maps each node to an index
// into `motifs` (-1 for base nodes); for BA-2motifs there is one motif per
// graph, indexed by graph.
struct GroundTruth {
  std::vector<NodeSet> motifs;
  std::vector<int> motif_of;
  int motif_size = 0;

  const NodeSet* motif_for_node(NodeId v) const;
};

struct Dataset {
  SyntheticSpec spec;
  std::vector<Graph> graphs;  // exactly one for node-classification kinds
  GroundTruth truth;
  int num_classes = 0;
  bool graph_task = false;
};

Dataset build_synthetic(const SyntheticSpec& spec);

/// Node count of the complete binary tree of the given depth (root at 0).
int binary_tree_size(int depth);

struct BernoulliLike {
  double p = 0.013;
};
struct UniformSparse {
  double p = 0.1;
};
struct GaussianNoise {
  double mean = 0.0;
  double sd = 1.0;
};
using NoiseDistribution = std::variant<BernoulliLike, UniformSparse, GaussianNoise>;

struct NoisyFeatures {
  Graph graph;
  std::vector<int> noisy_ids;
};

/// Appends ceil(fraction * F) noise columns to every node.
NoisyFeatures add_noisy_features(const Graph& g, double fraction,
                                 const NoiseDistribution& dist, std::uint64_t seed);

struct NoisyNodes {
  Graph graph;
  NodeSet noisy_ids;
};

/// Appends max(1, floor(fraction * N)) nodes, each linked to every original
/// node with probability connect_prob (at least one link is forced). New
/// nodes carry label -1.
NoisyNodes add_noisy_nodes(const Graph& g, double fraction, double connect_prob,
                           const NoiseDistribution& feature_dist, std::uint64_t seed);

/// Text format: "N F", N feature rows, a blank line, then "i j" per edge.
/// Labels go to the sibling file `<path>.labels`: N integers one per line, or
/// a single "graph <label>" line.
void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);
std::filesystem::path labels_path(const std::filesystem::path& graph_path);

struct Manifest {
  std::string kind;
  std::uint64_t seed = 0;
  int num_classes = 0;
  bool graph_task = false;
  std::vector<std::filesystem::path> graph_files;  // absolute or manifest-relative
  GroundTruth truth;
  std::vector<int> noisy_features;
  NodeSet noisy_nodes;
  nlohmann::json spec;
};

nlohmann::json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

/// Writes graphs and a manifest.json into `dir`; returns the manifest path.
std::filesystem::path write_dataset(const Dataset& data, const std::filesystem::path& dir,
                                    const std::vector<int>& noisy_features = {},
                                    const NodeSet& noisy_nodes = {});

struct LoadedDataset {
  Manifest manifest;
  std::vector<Graph> graphs;
};

/// Accepts a manifest JSON or a bare graph file.
LoadedDataset load_dataset(const std::filesystem::path& path);

}  // namespace graphsvx
