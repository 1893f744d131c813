#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphsvx/gnn.hpp"
#include "graphsvx/graph.hpp"
#include "graphsvx/masks.hpp"
#include "graphsvx/perturb.hpp"

namespace graphsvx {

struct Attribution {
  int id = 0;
  double value = 0.0;
};

struct Explanation {
  std::optional<NodeId> target_node;
  std::optional<int> target_graph;
  int predicted_class = -1;
  double base_value = 0.0;
  double full_prediction = 0.0;
  double isolated_prediction = 0.0;
  double r_squared = 0.0;
  int num_samples = 0;
  bool rank_deficient = false;  // surrogate fell back to a minimum-norm solve
  std::vector<Attribution> phi_features;
  std::vector<Attribution> phi_nodes;
  nlohmann::json options = nlohmann::json::object();

  double feature_sum() const;
  double node_sum() const;
  /// Features first, then nodes, in player order.
  std::vector<double> phi() const;
};

enum class FitKind { WLR, WeightedLasso };

std::string to_string(FitKind kind);
std::optional<FitKind> parse_fit_kind(const std::string& name);

struct FitOptions {
  FitKind kind = FitKind::WLR;
  std::optional<double> lasso_penalty;  // default 0.01 * max|Z^T W y|
};

struct SurrogateFit {
  double intercept = 0.0;
  Vector coefficients;
  double r_squared = 0.0;
  bool rank_deficient = false;
};

/// Weighted fit of y ~ intercept + z . phi. The lasso leaves the intercept
/// unpenalised. When the weighted normal matrix is too ill-conditioned for
/// wls_solve, the fit falls back to the minimum-norm least-squares solution
/// that drops directions below 1e-6 of the largest weighted singular value
/// and sets rank_deficient. `fit_rows` selects the rows entering r_squared (all rows
/// when empty).
SurrogateFit fit_surrogate(const DenseMatrix& masks, const Vector& targets,
                           const Vector& weights, const FitOptions& opts,
                           const std::vector<char>& fit_rows = {});

/// Fits the surrogate on sample targets. full_prediction and
/// isolated_prediction are read from the all-one and (all features, no
/// nodes) samples; r_squared excludes those anchors and the all-zero mask.
Explanation fit_explanation(const std::vector<PerturbSample>& samples,
                            const std::vector<double>& weights, const PlayerIndex& players,
                            const FitOptions& opts = {});

struct ShapleyValues {
  double base_value = 0.0;
  std::vector<double> phi;
};

/// Exact Shapley values by enumeration. `value` receives the coalition as a
/// bit set (bit i = player i). Throws TooManyPlayers for m > 20.
ShapleyValues exact_shapley(int m, const std::function<double(std::uint32_t)>& value);

/// Z^T W Z over all 2^M coalitions with kernel weights (anchors at c).
DenseMatrix normal_matrix(int m, double c);

/// max |Z^T W Z - ((M-1)/M) I - c J|. Throws TooManyPlayers for M > 15.
double normal_matrix_check(int m, double c);

/// Scales the node block to sum alpha * gap and the feature block to
/// (1 - alpha) * gap, gap = full_prediction - base_value. A block summing to
/// zero is left unchanged.
Explanation rescale(const Explanation& e, double alpha);

enum class GraphPlayers { Nodes, Features };

struct ExplainOptions {
  MaskOptions masks;
  double lambda = 1.0;
  PerturbMode mode = PerturbMode::NodeLocal;
  bool indirect_effect = false;
  PathNodeFill path_fill = PathNodeFill::MonteCarloMean;
  bool random_paths = false;
  std::optional<NodeId> contrast_node;
  NodeSet global_nodes;
  GraphPlayers graph_players = GraphPlayers::Nodes;
  FitOptions fit;
  std::optional<double> alpha;
  int jobs = 1;
};

nlohmann::json options_to_json(const ExplainOptions& opts);

// Everything one explanation evaluates against: the player set and the
// perturbation setup, on a view of the graph. For node targets the view is
// the subgraph induced by the target's (L+1)-hop ball plus any extra player
// nodes, which reproduces the model's output at the target exactly. The
// model is held by reference and must outlive the context.
class ExplainContext {
 public:
  /// Players chosen by the configured mode.
  ExplainContext(const Graph& g, const GnnModel& model, std::optional<NodeId> target,
                 const ExplainOptions& opts);
  /// Caller-supplied players (global ids).
  ExplainContext(const Graph& g, const GnnModel& model, PlayerIndex players,
                 const ExplainOptions& opts);

  const PlayerIndex& players() const { return players_; }
  const PlayerIndex& local_players() const { return local_players_; }
  const Graph& view() const { return view_; }
  const PerturbConfig& config() const { return cfg_; }
  const TargetClasses& targets() const { return targets_; }
  int predicted_class() const { return targets_.classes.front(); }

  double value(const CoalitionMask& mask) const;
  std::vector<PerturbSample> evaluate(const MaskBatch& batch, int jobs) const;

 private:
  void build(const Graph& g);

  const GnnModel* model_;
  ExplainOptions opts_;
  PlayerIndex players_;
  PlayerIndex local_players_;
  Graph view_;
  PerturbConfig cfg_;
  TargetClasses targets_;
};

/// reduce players, generate masks, evaluate, fit, optionally rescale.
Explanation explain(const Graph& g, const GnnModel& model, std::optional<NodeId> target,
                    const ExplainOptions& opts);
Explanation explain(const ExplainContext& ctx, const ExplainOptions& opts);

/// Exact Shapley values of the same game the explainer fits.
ShapleyValues explain_oracle(const ExplainContext& ctx);

nlohmann::json to_json(const Explanation& e);
Explanation explanation_from_json(const nlohmann::json& j);

}  // namespace graphsvx
