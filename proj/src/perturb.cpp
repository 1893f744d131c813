#include "graphsvx/perturb.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "graphsvx/errors.hpp"
#include "graphsvx/parallel.hpp"
#include "graphsvx/random.hpp"

namespace graphsvx {
namespace {

// Reachability from `source` using only nodes flagged in `allowed`.
std::vector<char> reachable_within(const Graph& g, NodeId source, const std::vector<char>& allowed) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::deque<NodeId> queue{source};
  seen[source] = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId w : g.neighbors(u)) {
      if (!seen[w] && allowed[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

std::uint64_t mask_hash(const CoalitionMask& mask, std::uint64_t seed) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (auto bit : mask.z) h = (h ^ bit) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL;
  return h;
}

int argmax(const DenseMatrix& m, int row) {
  int best = 0;
  for (int c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

}  // namespace

std::string to_string(PerturbMode mode) {
  switch (mode) {
    case PerturbMode::NodeLocal: return "node";
    case PerturbMode::Contrastive: return "contrastive";
    case PerturbMode::GlobalSubgraphFeatures: return "global-subgraph";
    case PerturbMode::GraphTask: return "graph";
    case PerturbMode::GlobalNodeSet: return "global-nodes";
  }
  return "unknown";
}

Vector monte_carlo_mean(const Graph& g, int samples, std::uint64_t seed) {
  Vector mean = Vector::Zero(g.num_features());
  if (g.num_nodes() == 0 || samples <= 0) return mean;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const auto row = static_cast<int>(uniform_index(rng, g.num_nodes()));
    mean += g.features().row(row).transpose();
  }
  return mean / samples;
}

PerturbConfig PerturbConfig::for_graph(const Graph& g, std::uint64_t seed) {
  PerturbConfig cfg;
  cfg.feature_baseline = feature_moments(g).mean;
  cfg.mc_mean = monte_carlo_mean(g, 100, seed);
  cfg.seed = seed;
  return cfg;
}

void PerturbConfig::validate(int num_features) const {
  if (feature_baseline.size() != num_features) {
    throw DimensionMismatch("feature baseline has length " + std::to_string(feature_baseline.size()) +
                            ", graph has " + std::to_string(num_features) + " features");
  }
  if (mode == PerturbMode::Contrastive && contrast.size() != num_features) {
    throw DimensionMismatch("contrast vector length differs from feature count");
  }
  if ((mode == PerturbMode::GlobalSubgraphFeatures || indirect_effect) &&
      mc_mean.size() != num_features) {
    throw DimensionMismatch("Monte-Carlo mean length differs from feature count");
  }
  if (mode == PerturbMode::GlobalNodeSet && global_nodes.empty()) {
    throw std::invalid_argument("GlobalNodeSet mode needs a non-empty node set");
  }
}

Graph gen_perturbed(const Graph& g, const PlayerIndex& players, const CoalitionMask& mask,
                    const PerturbConfig& cfg) {
  if (mask.size() != players.size()) {
    throw DimensionMismatch("mask length " + std::to_string(mask.size()) + " != players " +
                            std::to_string(players.size()));
  }
  cfg.validate(g.num_features());
  const int b = players.num_features();
  DenseMatrix x = g.features();
  for (int i = 0; i < b; ++i) {
    if (mask[i]) continue;
    const int j = players.feature_ids[i];
    switch (cfg.mode) {
      case PerturbMode::NodeLocal:
        x(*players.target, j) = cfg.feature_baseline[j];
        break;
      case PerturbMode::Contrastive:
        x(*players.target, j) = cfg.contrast[j];
        break;
      case PerturbMode::GlobalSubgraphFeatures:
        x(*players.target, j) = cfg.mc_mean[j];
        for (NodeId u : cfg.feature_rows) x(u, j) = cfg.mc_mean[j];
        break;
      case PerturbMode::GraphTask:
        x.col(j).setConstant(cfg.feature_baseline[j]);
        break;
      case PerturbMode::GlobalNodeSet:
        for (NodeId u : cfg.global_nodes) x(u, j) = cfg.feature_baseline[j];
        break;
    }
  }
  NodeSet excluded;
  for (int i = 0; i < players.num_nodes(); ++i) {
    if (!mask[b + i]) excluded.push_back(players.node_ids[i]);
  }
  if (excluded.empty()) return g.with_features(std::move(x));
  return isolate_nodes(g, excluded).with_features(std::move(x));
}

Graph apply_indirect_effect(const Graph& g_orig, const Graph& g_pert, const PlayerIndex& players,
                            const CoalitionMask& mask, const PerturbConfig& cfg) {
  if (!players.target || players.num_nodes() == 0) return g_pert;
  const NodeId v = *players.target;
  const int b = players.num_features();

  std::vector<char> allowed(g_orig.num_nodes(), 0);
  std::vector<char> included(g_orig.num_nodes(), 0);
  allowed[v] = 1;
  for (int i = 0; i < players.num_nodes(); ++i) {
    allowed[players.node_ids[i]] = 1;
    included[players.node_ids[i]] = mask[b + i];
  }

  const std::vector<int> dist = bfs_distances(g_orig, v);
  NodeSet order;
  for (int i = 0; i < players.num_nodes(); ++i) {
    if (mask[b + i]) order.push_back(players.node_ids[i]);
  }
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId c) {
    return std::pair(dist[a], a) < std::pair(dist[c], c);
  });

  Rng rng(mask_hash(mask, cfg.seed));
  std::vector<Edge> edges = g_pert.edges();
  DenseMatrix x = g_pert.features();
  Graph current = g_pert;
  std::vector<char> reach = reachable_within(current, v, allowed);
  bool changed = false;
  for (NodeId w : order) {
    if (reach[w]) continue;
    const auto path = shortest_path(g_orig, v, w, cfg.random_paths ? &rng : nullptr);
    if (!path) continue;
    for (std::size_t k = 0; k + 1 < path->size(); ++k) {
      edges.push_back({std::min((*path)[k], (*path)[k + 1]), std::max((*path)[k], (*path)[k + 1])});
    }
    for (std::size_t k = 1; k + 1 < path->size(); ++k) {
      const NodeId u = (*path)[k];
      if (!allowed[u] || included[u]) continue;
      if (cfg.path_fill == PathNodeFill::ExplainedNode) {
        x.row(u) = g_orig.features().row(v);
      } else {
        x.row(u) = cfg.mc_mean.transpose();
      }
    }
    current = Graph(g_pert.num_nodes(), edges, x);
    reach = reachable_within(current, v, allowed);
    changed = true;
  }
  if (!changed) return g_pert;
  current.node_labels = g_pert.node_labels;
  current.graph_label = g_pert.graph_label;
  return current;
}

Graph perturb(const Graph& g, const PlayerIndex& players, const CoalitionMask& mask,
              const PerturbConfig& cfg) {
  Graph out = gen_perturbed(g, players, mask, cfg);
  const bool local = cfg.mode == PerturbMode::NodeLocal || cfg.mode == PerturbMode::Contrastive ||
                     cfg.mode == PerturbMode::GlobalSubgraphFeatures;
  if (cfg.indirect_effect && local) out = apply_indirect_effect(g, out, players, mask, cfg);
  return out;
}

TargetClasses target_classes(const Graph& g, const PlayerIndex& players, const GnnModel& model,
                             const PerturbConfig& cfg) {
  const DenseMatrix out = gcn_forward(model, g);
  TargetClasses t;
  if (model.task == Task::GraphClassification) {
    t.classes.push_back(argmax(out, 0));
    return t;
  }
  if (cfg.mode == PerturbMode::GlobalNodeSet) {
    t.nodes = cfg.global_nodes;
  } else {
    if (!players.target) throw std::invalid_argument("node explanation without a target node");
    t.nodes = {*players.target};
  }
  for (NodeId u : t.nodes) {
    if (u < 0 || u >= g.num_nodes()) throw std::out_of_range("target node out of range");
    t.classes.push_back(argmax(out, u));
  }
  return t;
}

PerturbSample score_graph(const Graph& perturbed, const CoalitionMask& mask, const GnnModel& model,
                          const TargetClasses& targets) {
  const DenseMatrix out = gcn_forward(model, perturbed);
  PerturbSample s;
  s.mask = mask;
  if (targets.nodes.empty()) {
    s.output = out.row(0).transpose();
    s.target_score = out(0, targets.classes[0]);
    return s;
  }
  s.output = Vector::Zero(out.cols());
  for (std::size_t i = 0; i < targets.nodes.size(); ++i) {
    s.output += out.row(targets.nodes[i]).transpose();
    s.target_score += out(targets.nodes[i], targets.classes[i]);
  }
  const double n = static_cast<double>(targets.nodes.size());
  s.output /= n;
  s.target_score /= n;
  return s;
}

std::vector<PerturbSample> eval_samples(const Graph& g, const PlayerIndex& players,
                                        const MaskBatch& batch, const GnnModel& model,
                                        const PerturbConfig& cfg, int jobs) {
  cfg.validate(g.num_features());
  const TargetClasses targets = target_classes(g, players, model, cfg);
  std::vector<PerturbSample> samples(batch.masks.size());
  parallel_for(batch.size(), jobs, [&](int i) {
    samples[i] = score_graph(perturb(g, players, batch.masks[i], cfg), batch.masks[i], model, targets);
  });
  return samples;
}

}  // namespace graphsvx
