#include "graphsvx/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "graphsvx/errors.hpp"
#include "graphsvx/parallel.hpp"

namespace graphsvx {
namespace {

constexpr int kExplanationSchemaVersion = 1;

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Weighted lasso by ADMM with residual balancing; the intercept (column 0)
// is not penalised. Minimises 1/2 sum w (y - D b)^2 + penalty * |b[1:]|_1.
Vector weighted_lasso(const DenseMatrix& design, const Vector& y, const Vector& w, double penalty) {
  const int p = static_cast<int>(design.cols());
  const Eigen::MatrixXd gram = design.transpose() * w.asDiagonal() * design;
  const Vector rhs = design.transpose() * (w.array() * y.array()).matrix();
  double rho = std::max(gram.diagonal().minCoeff(), 1e-6);
  Eigen::LLT<Eigen::MatrixXd> llt(gram + rho * Eigen::MatrixXd::Identity(p, p));
  Vector z = Vector::Zero(p), u = Vector::Zero(p), x = Vector::Zero(p);
  for (int iter = 0; iter < 20000; ++iter) {
    x = llt.solve(rhs + rho * (z - u));
    const Vector z_old = z;
    z[0] = x[0] + u[0];
    for (int j = 1; j < p; ++j) z[j] = soft_threshold(x[j] + u[j], penalty / rho);
    u += x - z;
    const double primal = (x - z).norm();
    const double dual = rho * (z - z_old).norm();
    const double scale = std::max({x.norm(), z.norm(), 1e-12});
    if (primal < 1e-10 * scale && dual < 1e-10 * std::max(rho * u.norm(), 1e-12)) break;
    if (primal > 10.0 * dual || dual > 10.0 * primal) {
      const double factor = primal > dual ? 2.0 : 0.5;
      rho *= factor;
      u /= factor;
      llt.compute(gram + rho * Eigen::MatrixXd::Identity(p, p));
    }
  }
  return z;
}

bool is_anchor(const CoalitionMask& m, int b) {
  const int s = m.count();
  if (s == 0 || s == m.size()) return true;
  if (s != b) return false;
  return std::all_of(m.z.begin(), m.z.begin() + b, [](auto bit) { return bit == 1; });
}

int find_mask(const std::vector<PerturbSample>& samples, const CoalitionMask& target) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].mask == target) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> non_constant_features(const Graph& g) {
  const FeatureMoments mom = feature_moments(g);
  std::vector<int> ids;
  for (int j = 0; j < g.num_features(); ++j) {
    if (mom.sd[j] > 0.0) ids.push_back(j);
  }
  return ids;
}

NodeSet remap(const NodeSet& nodes, const std::vector<NodeId>& to_local) {
  NodeSet out;
  out.reserve(nodes.size());
  for (NodeId u : nodes) out.push_back(to_local[u]);
  return out;
}

nlohmann::json attributions_to_json(const std::vector<Attribution>& a) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : a) arr.push_back({{"id", x.id}, {"value", x.value}});
  return arr;
}

std::vector<Attribution> attributions_from_json(const nlohmann::json& arr) {
  std::vector<Attribution> out;
  for (const auto& x : arr) out.push_back({x.at("id").get<int>(), x.at("value").get<double>()});
  return out;
}

}  // namespace

double Explanation::feature_sum() const {
  double s = 0.0;
  for (const auto& a : phi_features) s += a.value;
  return s;
}

double Explanation::node_sum() const {
  double s = 0.0;
  for (const auto& a : phi_nodes) s += a.value;
  return s;
}

std::vector<double> Explanation::phi() const {
  std::vector<double> out;
  for (const auto& a : phi_features) out.push_back(a.value);
  for (const auto& a : phi_nodes) out.push_back(a.value);
  return out;
}

std::string to_string(FitKind kind) { return kind == FitKind::WLR ? "wlr" : "lasso"; }

std::optional<FitKind> parse_fit_kind(const std::string& name) {
  if (name == "wlr") return FitKind::WLR;
  if (name == "lasso") return FitKind::WeightedLasso;
  return std::nullopt;
}

SurrogateFit fit_surrogate(const DenseMatrix& masks, const Vector& targets, const Vector& weights,
                           const FitOptions& opts, const std::vector<char>& fit_rows) {
  const auto n = masks.rows();
  const auto m = masks.cols();
  if (targets.size() != n || weights.size() != n) {
    throw DimensionMismatch("fit_surrogate: masks, targets and weights disagree in length");
  }
  if (n < m + 1) {
    throw InsufficientSamples(std::to_string(n) + " samples for " + std::to_string(m) +
                              " players; need at least players + 1");
  }
  DenseMatrix design(n, m + 1);
  design.col(0).setOnes();
  design.rightCols(m) = masks;

  Vector beta;
  SurrogateFit fit;
  if (opts.kind == FitKind::WLR) {
    try {
      beta = wls_solve(design, targets, weights);
    } catch (const SingularSystem&) {
      const Vector root = weights.cwiseSqrt();
      const Eigen::MatrixXd scaled = root.asDiagonal() * design;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-6);
      beta = svd.solve(root.cwiseProduct(targets));
      fit.rank_deficient = true;
    }
  } else {
    double penalty = 0.0;
    if (opts.lasso_penalty) {
      penalty = *opts.lasso_penalty;
    } else {
      const Vector corr = masks.transpose() * (weights.array() * targets.array()).matrix();
      penalty = 0.01 * (corr.size() ? corr.cwiseAbs().maxCoeff() : 0.0);
    }
    if (!(penalty >= 0.0)) throw std::invalid_argument("lasso penalty must be >= 0");
    beta = weighted_lasso(design, targets, weights, penalty);
  }

  fit.intercept = beta[0];
  fit.coefficients = beta.tail(m);
  const Vector pred = design * beta;
  double wsum = 0.0, wmean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fit_rows.empty() && !fit_rows[i]) continue;
    wsum += weights[i];
    wmean += weights[i] * targets[i];
  }
  if (wsum <= 0.0) {
    fit.r_squared = 1.0;
    return fit;
  }
  wmean /= wsum;
  double ss_res = 0.0, ss_tot = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fit_rows.empty() && !fit_rows[i]) continue;
    ss_res += weights[i] * (targets[i] - pred[i]) * (targets[i] - pred[i]);
    ss_tot += weights[i] * (targets[i] - wmean) * (targets[i] - wmean);
  }
  fit.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-20 ? 1.0 : 0.0);
  return fit;
}

Explanation fit_explanation(const std::vector<PerturbSample>& samples,
                            const std::vector<double>& weights, const PlayerIndex& players,
                            const FitOptions& opts) {
  const int n = static_cast<int>(samples.size());
  const int m = players.size();
  if (static_cast<int>(weights.size()) != n) {
    throw DimensionMismatch("fit_explanation: samples and weights differ in length");
  }
  DenseMatrix z(n, m);
  Vector y(n), w(n);
  std::vector<char> rows(n, 1);
  for (int i = 0; i < n; ++i) {
    if (samples[i].mask.size() != m) throw DimensionMismatch("fit_explanation: mask length != players");
    for (int j = 0; j < m; ++j) z(i, j) = samples[i].mask.z[j];
    y[i] = samples[i].target_score;
    w[i] = weights[i];
    rows[i] = !is_anchor(samples[i].mask, players.num_features());
  }
  const SurrogateFit fit = fit_surrogate(z, y, w, opts, rows);

  Explanation e;
  e.target_node = players.target;
  e.base_value = fit.intercept;
  e.r_squared = fit.r_squared;
  e.rank_deficient = fit.rank_deficient;
  e.num_samples = n;
  for (int i = 0; i < players.num_features(); ++i) {
    e.phi_features.push_back({players.feature_ids[i], fit.coefficients[i]});
  }
  for (int i = 0; i < players.num_nodes(); ++i) {
    e.phi_nodes.push_back({players.node_ids[i], fit.coefficients[players.num_features() + i]});
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int full = find_mask(samples, CoalitionMask::ones(m));
  e.full_prediction = full >= 0 ? samples[full].target_score : nan;
  CoalitionMask iso = CoalitionMask::zeros(m);
  std::fill(iso.z.begin(), iso.z.begin() + players.num_features(), 1);
  const int isolated = find_mask(samples, iso);
  e.isolated_prediction = isolated >= 0 ? samples[isolated].target_score : nan;
  return e;
}

ShapleyValues exact_shapley(int m, const std::function<double(std::uint32_t)>& value) {
  if (m > 20) throw TooManyPlayers("exact_shapley needs M <= 20, got " + std::to_string(m));
  if (m < 0) throw std::invalid_argument("exact_shapley: negative player count");
  const std::uint32_t count = 1u << m;
  std::vector<double> vals(count);
  for (std::uint32_t s = 0; s < count; ++s) vals[s] = value(s);
  // |S|! (M - |S| - 1)! / M!
  std::vector<double> coef(std::max(m, 1));
  for (int k = 0; k < m; ++k) {
    coef[k] = std::exp(std::lgamma(k + 1.0) + std::lgamma(m - k + 0.0) - std::lgamma(m + 1.0));
  }
  ShapleyValues out;
  out.base_value = vals[0];
  out.phi.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    const std::uint32_t bit = 1u << j;
    double acc = 0.0;
    for (std::uint32_t s = 0; s < count; ++s) {
      if (s & bit) continue;
      acc += coef[std::popcount(s)] * (vals[s | bit] - vals[s]);
    }
    out.phi[j] = acc;
  }
  return out;
}

DenseMatrix normal_matrix(int m, double c) {
  if (m > 15) throw TooManyPlayers("normal_matrix needs M <= 15");
  if (m < 1) throw std::invalid_argument("normal_matrix: M must be >= 1");
  DenseMatrix a = DenseMatrix::Zero(m, m);
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    const double w = kernel_weight(m, std::popcount(s), c);
    for (int i = 0; i < m; ++i) {
      if (!(s >> i & 1u)) continue;
      for (int j = 0; j < m; ++j) {
        if (s >> j & 1u) a(i, j) += w;
      }
    }
  }
  return a;
}

double normal_matrix_check(int m, double c) {
  DenseMatrix expected = DenseMatrix::Constant(m, m, c);
  expected.diagonal().array() += (m - 1.0) / m;
  return (normal_matrix(m, c) - expected).cwiseAbs().maxCoeff();
}

Explanation rescale(const Explanation& e, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("rescale: alpha must lie in [0, 1]");
  Explanation out = e;
  const double gap = e.full_prediction - e.base_value;
  const double ns = e.node_sum();
  const double fs = e.feature_sum();
  if (ns != 0.0) {
    for (auto& a : out.phi_nodes) a.value *= alpha * gap / ns;
  }
  if (fs != 0.0) {
    for (auto& a : out.phi_features) a.value *= (1.0 - alpha) * gap / fs;
  }
  out.options["alpha"] = alpha;
  return out;
}

nlohmann::json options_to_json(const ExplainOptions& o) {
  nlohmann::json j;
  j["strategy"] = to_string(o.masks.strategy);
  j["samples"] = o.masks.num_samples;
  j["max_order"] = o.masks.max_order;
  j["feature_share"] = o.masks.feature_share ? nlohmann::json(*o.masks.feature_share) : nlohmann::json();
  j["anchor_weight"] = o.masks.anchor_weight;
  j["kernel_scope"] = o.masks.scope == KernelScope::Block ? "block" : "full";
  j["seed"] = o.masks.seed;
  j["lambda"] = o.lambda;
  j["mode"] = to_string(o.mode);
  j["indirect_effect"] = o.indirect_effect;
  j["path_fill"] = o.path_fill == PathNodeFill::MonteCarloMean ? "mc-mean" : "explained-node";
  j["random_paths"] = o.random_paths;
  j["contrast_node"] = o.contrast_node ? nlohmann::json(*o.contrast_node) : nlohmann::json();
  j["global_nodes"] = o.global_nodes;
  j["graph_players"] = o.graph_players == GraphPlayers::Nodes ? "nodes" : "features";
  j["fit"] = to_string(o.fit.kind);
  j["lasso_penalty"] = o.fit.lasso_penalty ? nlohmann::json(*o.fit.lasso_penalty) : nlohmann::json();
  j["alpha"] = o.alpha ? nlohmann::json(*o.alpha) : nlohmann::json();
  return j;
}

ExplainContext::ExplainContext(const Graph& g, const GnnModel& model, std::optional<NodeId> target,
                               const ExplainOptions& opts)
    : model_(&model), opts_(opts) {
  const bool graph_task = model.task == Task::GraphClassification;
  if (graph_task != (opts.mode == PerturbMode::GraphTask)) {
    throw std::invalid_argument("graph mode must be used exactly with graph-classification models");
  }
  switch (opts.mode) {
    case PerturbMode::GraphTask:
      if (opts.graph_players == GraphPlayers::Nodes) {
        players_.node_ids.resize(g.num_nodes());
        std::iota(players_.node_ids.begin(), players_.node_ids.end(), 0);
      } else {
        players_.feature_ids = non_constant_features(g);
      }
      break;
    case PerturbMode::GlobalNodeSet:
      players_.feature_ids = non_constant_features(g);
      break;
    case PerturbMode::NodeLocal:
    case PerturbMode::Contrastive:
    case PerturbMode::GlobalSubgraphFeatures:
      if (!target) throw std::invalid_argument("this mode needs a target node");
      players_ = reduce_players(g, model, *target, opts.lambda);
      if (opts.mode == PerturbMode::GlobalSubgraphFeatures) players_.node_ids.clear();
      break;
  }
  build(g);
}

ExplainContext::ExplainContext(const Graph& g, const GnnModel& model, PlayerIndex players,
                               const ExplainOptions& opts)
    : model_(&model), opts_(opts), players_(std::move(players)) {
  build(g);
}

void ExplainContext::build(const Graph& g) {
  players_.validate();
  for (NodeId u : players_.node_ids) {
    if (u < 0 || u >= g.num_nodes()) throw std::out_of_range("player node out of range");
  }
  for (int j : players_.feature_ids) {
    if (j < 0 || j >= g.num_features()) throw std::out_of_range("player feature out of range");
  }
  cfg_ = PerturbConfig::for_graph(g, opts_.masks.seed);
  cfg_.mode = opts_.mode;
  cfg_.indirect_effect = opts_.indirect_effect;
  cfg_.path_fill = opts_.path_fill;
  cfg_.random_paths = opts_.random_paths;
  if (opts_.mode == PerturbMode::Contrastive) {
    if (!opts_.contrast_node || *opts_.contrast_node < 0 || *opts_.contrast_node >= g.num_nodes()) {
      throw std::invalid_argument("contrastive mode needs a valid reference node");
    }
    cfg_.contrast = g.features().row(*opts_.contrast_node).transpose();
  }
  cfg_.global_nodes = opts_.global_nodes;
  const int layers = model_->num_layers();
  if (opts_.mode == PerturbMode::GlobalSubgraphFeatures) {
    cfg_.feature_rows = k_hop_neighbors(g, *players_.target, layers);
  }

  const bool local = players_.target && model_->task == Task::NodeClassification &&
                     opts_.mode != PerturbMode::GlobalNodeSet;
  if (!local) {
    view_ = g;
    local_players_ = players_;
  } else {
    const NodeId v = *players_.target;
    if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("target node out of range");
    NodeSet nodes = k_hop_neighbors(g, v, layers + 1);
    nodes.push_back(v);
    nodes.insert(nodes.end(), players_.node_ids.begin(), players_.node_ids.end());
    nodes.insert(nodes.end(), cfg_.feature_rows.begin(), cfg_.feature_rows.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    Subgraph sub = induced_subgraph(g, nodes);
    local_players_ = players_;
    local_players_.target = sub.to_local[v];
    local_players_.node_ids = remap(players_.node_ids, sub.to_local);
    cfg_.feature_rows = remap(cfg_.feature_rows, sub.to_local);
    view_ = std::move(sub.graph);
  }
  targets_ = target_classes(view_, local_players_, *model_, cfg_);
}

double ExplainContext::value(const CoalitionMask& mask) const {
  return score_graph(perturb(view_, local_players_, mask, cfg_), mask, *model_, targets_).target_score;
}

std::vector<PerturbSample> ExplainContext::evaluate(const MaskBatch& batch, int jobs) const {
  std::vector<PerturbSample> samples(batch.masks.size());
  parallel_for(batch.size(), jobs, [&](int i) {
    samples[i] = score_graph(perturb(view_, local_players_, batch.masks[i], cfg_), batch.masks[i],
                             *model_, targets_);
  });
  return samples;
}

Explanation explain(const ExplainContext& ctx, const ExplainOptions& opts) {
  const MaskBatch batch = gen_masks(ctx.players(), opts.masks);
  const std::vector<PerturbSample> samples = ctx.evaluate(batch, opts.jobs);
  Explanation e = fit_explanation(samples, batch.weights, ctx.players(), opts.fit);
  e.target_node = ctx.players().target;
  e.predicted_class = ctx.predicted_class();
  e.options = options_to_json(opts);
  if (opts.alpha) e = rescale(e, *opts.alpha);
  return e;
}

Explanation explain(const Graph& g, const GnnModel& model, std::optional<NodeId> target,
                    const ExplainOptions& opts) {
  return explain(ExplainContext(g, model, target, opts), opts);
}

ShapleyValues explain_oracle(const ExplainContext& ctx) {
  const int m = ctx.players().size();
  return exact_shapley(m, [&](std::uint32_t s) {
    CoalitionMask mask = CoalitionMask::zeros(m);
    for (int i = 0; i < m; ++i) mask.z[i] = (s >> i) & 1u;
    return ctx.value(mask);
  });
}

nlohmann::json to_json(const Explanation& e) {
  nlohmann::json j;
  j["schema_version"] = kExplanationSchemaVersion;
  if (e.target_node) j["target"] = {{"node", *e.target_node}};
  else if (e.target_graph) j["target"] = {{"graph", *e.target_graph}};
  else j["target"] = nullptr;
  j["predicted_class"] = e.predicted_class;
  j["base_value"] = e.base_value;
  j["full_prediction"] = e.full_prediction;
  j["isolated_prediction"] = e.isolated_prediction;
  j["phi_features"] = attributions_to_json(e.phi_features);
  j["phi_nodes"] = attributions_to_json(e.phi_nodes);
  j["r_squared"] = e.r_squared;
  j["num_samples"] = e.num_samples;
  j["rank_deficient"] = e.rank_deficient;
  j["options"] = e.options;
  return j;
}

Explanation explanation_from_json(const nlohmann::json& j) {
  Explanation e;
  try {
    const auto& t = j.at("target");
    if (t.is_object() && t.contains("node")) e.target_node = t["node"].get<NodeId>();
    if (t.is_object() && t.contains("graph")) e.target_graph = t["graph"].get<int>();
    e.predicted_class = j.at("predicted_class").get<int>();
    auto num = [&](const char* key) {
      return j.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at(key).get<double>();
    };
    e.base_value = num("base_value");
    e.full_prediction = num("full_prediction");
    e.isolated_prediction = num("isolated_prediction");
    e.r_squared = num("r_squared");
    e.num_samples = j.at("num_samples").get<int>();
    e.rank_deficient = j.value("rank_deficient", false);
    e.phi_features = attributions_from_json(j.at("phi_features"));
    e.phi_nodes = attributions_from_json(j.at("phi_nodes"));
    e.options = j.value("options", nlohmann::json::object());
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("explanation JSON: ") + ex.what());
  }
  return e;
}

}  // namespace graphsvx
