#include "graphsvx/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "graphsvx/random.hpp"

namespace graphsvx {

Graph::Graph(int num_nodes, std::vector<Edge> edges, DenseMatrix features)
    : num_nodes_(num_nodes), features_(std::move(features)) {
  if (num_nodes < 0) throw std::invalid_argument("Graph: negative node count");
  if (features_.rows() != num_nodes) {
    throw std::invalid_argument("Graph: feature matrix has " +
                                std::to_string(features_.rows()) +
                                " rows, expected " + std::to_string(num_nodes));
  }
  for (Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw std::invalid_argument("Graph: edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + ") out of range");
    }
    if (e.u == e.v) {
      throw std::invalid_argument("Graph: self-loop on node " +
                                  std::to_string(e.u));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  std::vector<int> degree(num_nodes, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(num_nodes + 1, 0);
  for (int i = 0; i < num_nodes; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[num_nodes]);
  std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
  // Sorted edge order makes every adjacency list ascending.
  for (const Edge& e : edges_) adjacency_[cursor[e.u]++] = e.v;
  for (const Edge& e : edges_) adjacency_[cursor[e.v]++] = e.u;
  for (int i = 0; i < num_nodes; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
  }
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

Graph Graph::with_features(DenseMatrix features) const {
  Graph out = *this;
  if (features.rows() != num_nodes_) {
    throw std::invalid_argument("Graph::with_features: row count mismatch");
  }
  out.features_ = std::move(features);
  return out;
}

Graph Graph::with_edges(std::vector<Edge> edges) const {
  Graph out(num_nodes_, std::move(edges), features_);
  out.node_labels = node_labels;
  out.graph_label = graph_label;
  return out;
}

bool structurally_equal(const Graph& a, const Graph& b) {
  return a.num_nodes() == b.num_nodes() && a.edges() == b.edges() &&
         a.features().rows() == b.features().rows() &&
         a.features().cols() == b.features().cols() &&
         a.features() == b.features() && a.node_labels == b.node_labels &&
         a.graph_label == b.graph_label;
}

std::vector<int> bfs_distances(const Graph& g, NodeId source, int max_depth) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    if (max_depth >= 0 && dist[u] >= max_depth) continue;
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

NodeSet k_hop_neighbors(const Graph& g, NodeId v, int k) {
  if (v < 0 || v >= g.num_nodes()) {
    throw std::invalid_argument("k_hop_neighbors: node out of range");
  }
  if (k < 1) throw std::invalid_argument("k_hop_neighbors: k must be >= 1");
  const auto dist = bfs_distances(g, v, k);
  NodeSet out;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (u != v && dist[u] > 0) out.push_back(u);
  }
  return out;
}

std::optional<std::vector<NodeId>> shortest_path(const Graph& g, NodeId v,
                                                 NodeId w,
                                                 std::mt19937_64* rng) {
  if (v < 0 || w < 0 || v >= g.num_nodes() || w >= g.num_nodes()) {
    throw std::invalid_argument("shortest_path: node out of range");
  }
  // Distances to w tell which neighbours keep us on a shortest path.
  const auto to_w = bfs_distances(g, w);
  if (to_w[v] < 0) return std::nullopt;

  // Number of shortest paths from each node to w, for uniform sampling.
  std::vector<double> count;
  if (rng != nullptr) {
    count.assign(g.num_nodes(), 0.0);
    std::vector<NodeId> order;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      if (to_w[u] >= 0 && to_w[u] <= to_w[v]) order.push_back(u);
    }
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return to_w[a] < to_w[b]; });
    for (NodeId u : order) {
      if (u == w) {
        count[u] = 1.0;
        continue;
      }
      for (NodeId x : g.neighbors(u)) {
        if (to_w[x] == to_w[u] - 1) count[u] += count[x];
      }
    }
  }

  std::vector<NodeId> path{v};
  NodeId cur = v;
  while (cur != w) {
    std::vector<NodeId> next;
    for (NodeId x : g.neighbors(cur)) {
      if (to_w[x] == to_w[cur] - 1) next.push_back(x);
    }
    if (rng == nullptr) {
      cur = next.front();  // neighbours are ascending
    } else {
      double total = 0.0;
      for (NodeId x : next) total += count[x];
      double r = uniform01(*rng) * total;
      cur = next.back();
      for (NodeId x : next) {
        if (r < count[x]) {
          cur = x;
          break;
        }
        r -= count[x];
      }
    }
    path.push_back(cur);
  }
  return path;
}

Graph isolate_nodes(const Graph& g, std::span<const NodeId> excluded) {
  if (excluded.empty()) return g;
  std::vector<char> drop(g.num_nodes(), 0);
  for (NodeId u : excluded) {
    if (u < 0 || u >= g.num_nodes()) {
      throw std::invalid_argument("isolate_nodes: node out of range");
    }
    drop[u] = 1;
  }
  std::vector<Edge> kept;
  kept.reserve(g.edges().size());
  for (const Edge& e : g.edges()) {
    if (!drop[e.u] && !drop[e.v]) kept.push_back(e);
  }
  return g.with_edges(std::move(kept));
}

Subgraph induced_subgraph(const Graph& g, NodeSet nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Subgraph out;
  out.to_local.assign(g.num_nodes(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.to_local[nodes[i]] = static_cast<NodeId>(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    const NodeId a = out.to_local[e.u];
    const NodeId b = out.to_local[e.v];
    if (a >= 0 && b >= 0) edges.push_back({a, b});
  }
  DenseMatrix features(static_cast<Eigen::Index>(nodes.size()), g.num_features());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = g.features().row(nodes[i]);
  }
  out.graph = Graph(static_cast<int>(nodes.size()), std::move(edges),
                    std::move(features));
  if (!g.node_labels.empty()) {
    for (NodeId u : nodes) out.graph.node_labels.push_back(g.node_labels[u]);
  }
  out.graph.graph_label = g.graph_label;
  out.to_global = std::move(nodes);
  return out;
}

}  // namespace graphsvx
