#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "graphsvx/tensor.hpp"

namespace graphsvx {

using NodeId = int;
using NodeSet = std::vector<NodeId>;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Undirected, unweighted graph with a dense node-feature matrix. Structure is
// immutable after construction: edits return new graphs. Edges are stored
// canonically (u < v), sorted, exactly once; adjacency is kept in CSR form.
class Graph {
 public:
  Graph() = default;

  // Throws std::invalid_argument on self-loops, out-of-range endpoints or a
  // feature row count that differs from num_nodes. Duplicate edges collapse.
  Graph(int num_nodes, std::vector<Edge> edges, DenseMatrix features);

  int num_nodes() const { return num_nodes_; }
  int num_features() const { return static_cast<int>(features_.cols()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const DenseMatrix& features() const { return features_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  int degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId a, NodeId b) const;

  Graph with_features(DenseMatrix features) const;
  Graph with_edges(std::vector<Edge> edges) const;

  // Labels travel with the graph but do not take part in its structure.
  std::vector<int> node_labels;  // empty when absent, -1 marks unlabelled
  std::optional<int> graph_label;

 private:
  int num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<NodeId> adjacency_;
  DenseMatrix features_;
};

bool structurally_equal(const Graph& a, const Graph& b);

/// Hop distance from `source` to every node, -1 where unreachable or beyond
/// `max_depth` (negative max_depth means unbounded).
std::vector<int> bfs_distances(const Graph& g, NodeId source,
                               int max_depth = -1);

/// All nodes u != v within k hops of v, ascending.
NodeSet k_hop_neighbors(const Graph& g, NodeId v, int k);

/// One minimum-hop path v -> w (inclusive). Without `rng` the
/// lexicographically smallest node sequence is returned; with `rng` a path is
/// drawn uniformly among all shortest paths. std::nullopt when disconnected.
std::optional<std::vector<NodeId>> shortest_path(const Graph& g, NodeId v,
                                                 NodeId w,
                                                 std::mt19937_64* rng = nullptr);

/// Removes every edge incident to a node of `excluded`; features untouched.
Graph isolate_nodes(const Graph& g, std::span<const NodeId> excluded);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_global;  // local id -> global id, ascending
  std::vector<NodeId> to_local;   // global id -> local id, -1 if absent
};

/// Induced subgraph on `nodes`. Local ids follow ascending global order so
/// that id-based tie-breaking is preserved. Labels are carried over.
Subgraph induced_subgraph(const Graph& g, NodeSet nodes);

}  // namespace graphsvx
