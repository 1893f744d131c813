#pragma once

#include <cstdint>
#include <vector>

#include "graphsvx/errors.hpp"
#include "graphsvx/gnn.hpp"
#include "graphsvx/masks.hpp"
#include "graphsvx/graph.hpp"
#include "graphsvx/random.hpp"

namespace fixtures {

using graphsvx::DenseMatrix;
using graphsvx::Edge;
using graphsvx::Graph;

// Random tree on n nodes plus `extra` random chords, Gaussian features.
inline Graph random_graph(int n, int extra, int features, std::uint64_t seed) {
  graphsvx::Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 1; u < n; ++u) {
    const int p = static_cast<int>(graphsvx::uniform_index(rng, u));
    edges.push_back({p, u});
  }
  for (int i = 0; i < extra; ++i) {
    const int a = static_cast<int>(graphsvx::uniform_index(rng, n));
    const int b = static_cast<int>(graphsvx::uniform_index(rng, n));
    if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
  }
  DenseMatrix x(n, features);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < features; ++j) x(i, j) = graphsvx::normal(rng);
  }
  return Graph(n, edges, x);
}

inline std::vector<int> random_labels(int n, int classes, std::uint64_t seed) {
  graphsvx::Rng rng(seed);
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(graphsvx::uniform_index(rng, classes));
  return labels;
}

// Random-weight model with small non-zero biases so that ReLU kinks are not
// hit systematically.
inline graphsvx::GnnModel random_model(int features, int layers, int hidden, int classes,
                                       std::uint64_t seed,
                                       graphsvx::Task task = graphsvx::Task::NodeClassification) {
  graphsvx::GnnModel m = graphsvx::GnnModel::init(features, std::vector<int>(layers, hidden), classes,
                                                  task, seed);
  graphsvx::Rng rng(seed + 7);
  for (auto& layer : m.layers) {
    for (int i = 0; i < layer.bias.size(); ++i) layer.bias[i] = graphsvx::uniform(rng, -0.2, 0.2);
  }
  for (int i = 0; i < m.classifier.bias.size(); ++i) m.classifier.bias[i] = graphsvx::uniform(rng, -0.2, 0.2);
  return m;
}

// Path 0 - 1 - ... - (n-1) with the given feature matrix.
inline Graph path_graph(int n, int features = 1) {
  std::vector<Edge> edges;
  for (int u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  return Graph(n, edges, DenseMatrix::Ones(n, features));
}

struct Instance {
  Graph graph;
  graphsvx::GnnModel model;
  graphsvx::NodeId target = 0;
  double lambda = 1.0;
  int num_players = 0;
};

// Random graph, random-weight 2-layer GCN and a target whose player count
// (retained features + 2-hop neighbours) lies in [2, max_players].
inline Instance small_instance(std::uint64_t seed, int max_players = 10) {
  graphsvx::Rng rng(seed * 7919 + 1);
  for (int attempt = 0;; ++attempt) {
    const int n = 8 + static_cast<int>(graphsvx::uniform_index(rng, 8));
    const int f = 3 + static_cast<int>(graphsvx::uniform_index(rng, 3));
    Instance inst;
    inst.graph = random_graph(n, static_cast<int>(graphsvx::uniform_index(rng, 3)), f, seed * 31 + attempt);
    inst.model = random_model(f, 2, 6, 3, seed * 17 + attempt);
    inst.lambda = graphsvx::uniform(rng, 0.5, 1.5);
    for (int tries = 0; tries < n; ++tries) {
      inst.target = static_cast<int>(graphsvx::uniform_index(rng, n));
      try {
        inst.num_players =
            graphsvx::reduce_players(inst.graph, inst.model, inst.target, inst.lambda).size();
      } catch (const graphsvx::EmptyPlayerSet&) {
        continue;
      }
      if (inst.num_players >= 2 && inst.num_players <= max_players) return inst;
    }
  }
}

}  // namespace fixtures
