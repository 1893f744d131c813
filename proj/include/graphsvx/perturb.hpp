#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphsvx/gnn.hpp"
#include "graphsvx/graph.hpp"
#include "graphsvx/masks.hpp"

namespace graphsvx {

enum class PerturbMode {
  NodeLocal,               // excluded features of v take the dataset mean
  Contrastive,             // excluded features of v take a reference node's values
  GlobalSubgraphFeatures,  // excluded feature j is averaged over v and its receptive field
  GraphTask,               // graph classification; players are all nodes or all features
  GlobalNodeSet            // excluded features are reset on a node set U, target averaged over U
};

std::string to_string(PerturbMode mode);

// What replaces an excluded node that sits on a re-inserted path.
enum class PathNodeFill { MonteCarloMean, ExplainedNode };

struct PerturbConfig {
  PerturbMode mode = PerturbMode::NodeLocal;
  Vector feature_baseline;  // per-feature mean over the dataset
  Vector contrast;          // reference feature row (Contrastive)
  NodeSet global_nodes;     // U (GlobalNodeSet)
  NodeSet feature_rows;     // rows reset with v in GlobalSubgraphFeatures
  Vector mc_mean;           // Monte-Carlo feature mean
  bool indirect_effect = false;
  PathNodeFill path_fill = PathNodeFill::MonteCarloMean;
  bool random_paths = false;
  std::uint64_t seed = 0;

  /// Baseline and Monte-Carlo mean taken from g; everything else default.
  static PerturbConfig for_graph(const Graph& g, std::uint64_t seed = 0);
  void validate(int num_features) const;
};

/// Mean of `samples` feature rows drawn uniformly with replacement.
Vector monte_carlo_mean(const Graph& g, int samples, std::uint64_t seed);

/// Feature resets for excluded feature players and isolation of excluded
/// node players. The target node is never isolated.
Graph gen_perturbed(const Graph& g, const PlayerIndex& players,
                    const CoalitionMask& mask, const PerturbConfig& cfg);

/// Re-inserts one shortest path of `g_orig` from the target to every
/// included node player cut off from it among the players of `g_pert`.
/// Excluded nodes on such a path get neutral features.
Graph apply_indirect_effect(const Graph& g_orig, const Graph& g_pert,
                            const PlayerIndex& players, const CoalitionMask& mask,
                            const PerturbConfig& cfg);

/// gen_perturbed followed by apply_indirect_effect when enabled.
Graph perturb(const Graph& g, const PlayerIndex& players, const CoalitionMask& mask,
              const PerturbConfig& cfg);

struct PerturbSample {
  CoalitionMask mask;
  Vector output;  // class probabilities (averaged over U for GlobalNodeSet)
  double target_score = 0.0;
};

/// Classes the regression target reads: the model's prediction on the
/// unperturbed input, one per explained node (several for GlobalNodeSet).
struct TargetClasses {
  NodeSet nodes;  // empty for graph classification
  std::vector<int> classes;
};
TargetClasses target_classes(const Graph& g, const PlayerIndex& players,
                             const GnnModel& model, const PerturbConfig& cfg);

/// Output and score of one perturbed graph.
PerturbSample score_graph(const Graph& perturbed, const CoalitionMask& mask,
                          const GnnModel& model, const TargetClasses& targets);

/// Evaluates every mask of the batch, in batch order. Results do not depend
/// on `jobs`.
std::vector<PerturbSample> eval_samples(const Graph& g, const PlayerIndex& players,
                                        const MaskBatch& batch, const GnnModel& model,
                                        const PerturbConfig& cfg, int jobs = 1);

}  // namespace graphsvx
