#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphsvx/gnn.hpp"
#include "graphsvx/graph.hpp"

namespace graphsvx {

// Players of one explanation: B retained features of the target, then D
// retained nodes. Mask coordinates follow the same order.
struct PlayerIndex {
  std::vector<int> feature_ids;
  NodeSet node_ids;
  std::optional<NodeId> target;  // absent for graph classification

  int num_features() const { return static_cast<int>(feature_ids.size()); }
  int num_nodes() const { return static_cast<int>(node_ids.size()); }
  int size() const { return num_features() + num_nodes(); }

  // Throws std::invalid_argument on duplicates or target in node_ids, and
  // EmptyPlayerSet when there are no players.
  void validate() const;
};

/// Node players are the L-hop neighbours of v (L = model depth); feature
/// players are the features j with x_vj outside mu_j +- lambda * sigma_j,
/// moments taken over all nodes of g.
PlayerIndex reduce_players(const Graph& g, const GnnModel& model, NodeId v,
                           double lambda);

/// Per-column mean and population standard deviation over all nodes.
struct FeatureMoments {
  Vector mean;
  Vector sd;
};
FeatureMoments feature_moments(const Graph& g);

struct CoalitionMask {
  std::vector<std::uint8_t> z;

  CoalitionMask() = default;
  explicit CoalitionMask(std::vector<std::uint8_t> bits) : z(std::move(bits)) {}
  static CoalitionMask zeros(int m) { return CoalitionMask(std::vector<std::uint8_t>(m, 0)); }
  static CoalitionMask ones(int m) { return CoalitionMask(std::vector<std::uint8_t>(m, 1)); }

  int size() const { return static_cast<int>(z.size()); }
  int count() const;
  bool operator[](int i) const { return z[i] != 0; }
  auto operator<=>(const CoalitionMask&) const = default;
};

struct MaskBatch {
  std::vector<CoalitionMask> masks;
  std::vector<double> weights;

  int size() const { return static_cast<int>(masks.size()); }
};

enum class MaskStrategy { All, Random, Smart, SmartSeparate, SmarterSeparate };

std::string to_string(MaskStrategy s);
std::optional<MaskStrategy> parse_mask_strategy(const std::string& name);

// Block: kernel over the block a separated mask varies in. Full: kernel over
// all B+D players.
enum class KernelScope { Block, Full };

struct MaskOptions {
  MaskStrategy strategy = MaskStrategy::SmarterSeparate;
  int num_samples = 400;
  int max_order = 4;
  std::optional<double> feature_share;
  double anchor_weight = 1e6;
  KernelScope scope = KernelScope::Block;
  std::uint64_t seed = 0;
};

/// (M-1) / (M s) / C(M-1, s) for 0 < s < M, `c` at s = 0 and s = M.
double kernel_weight(int m, int s, double c);

/// Number of samples the separated strategies reserve for the feature block.
int feature_budget(int total, int num_features, int num_nodes,
                   std::optional<double> share);

/// Coalition masks with kernel weights. The all-zero, all-one and
/// (all features, no nodes) masks are always present, each once.
MaskBatch gen_masks(const PlayerIndex& players, const MaskOptions& opts);

}  // namespace graphsvx
