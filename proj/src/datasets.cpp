#include "graphsvx/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "graphsvx/errors.hpp"
#include "graphsvx/random.hpp"

namespace graphsvx {
namespace {

constexpr int kManifestSchemaVersion = 1;

// Mutable edge-list builder used while assembling synthetic graphs.
struct Builder {
  int num_nodes = 0;
  std::set<Edge> edges;
  std::vector<int> labels;

  int add_nodes(int count, int label) {
    const int first = num_nodes;
    num_nodes += count;
    labels.insert(labels.end(), count, label);
    return first;
  }
  bool add_edge(int a, int b) {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    return edges.insert({a, b}).second;
  }
  Graph finish(DenseMatrix features) const {
    Graph g(num_nodes, {edges.begin(), edges.end()}, std::move(features));
    g.node_labels = labels;
    return g;
  }
};

// Preferential attachment: nodes 0..m-1 start isolated, node m links to all
// of them, every later node links to m distinct nodes drawn proportionally to
// degree. The result is connected.
void barabasi_albert(Builder& b, int n, int m, Rng& rng) {
  const int first = b.add_nodes(n, 0);
  std::vector<int> repeated;
  repeated.reserve(static_cast<std::size_t>(2 * n * m));
  for (int j = 0; j < m; ++j) {
    b.add_edge(first + m, first + j);
    repeated.push_back(first + j);
    repeated.push_back(first + m);
  }
  for (int i = m + 1; i < n; ++i) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      const int t = repeated[uniform_index(rng, repeated.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      b.add_edge(first + i, t);
      repeated.push_back(t);
      repeated.push_back(first + i);
    }
  }
}

void binary_tree(Builder& b, int depth) {
  const int n = binary_tree_size(depth);
  const int first = b.add_nodes(n, 0);
  for (int i = 1; i < n; ++i) b.add_edge(first + (i - 1) / 2, first + i);
}

struct Motif {
  std::vector<int> roles;  // label per motif node
  std::vector<Edge> edges;
};

// Bottom pair 0,1 (label 3), middle pair 2,3 (label 2), roof 4 (label 1).
Motif house(int role_offset = 0) {
  return {{3 + role_offset, 3 + role_offset, 2 + role_offset, 2 + role_offset, 1 + role_offset},
          {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}};
}

Motif cycle(int length, int label) {
  Motif m;
  m.roles.assign(length, label);
  for (int i = 0; i < length; ++i) m.edges.push_back({i, (i + 1) % length});
  return m;
}

Motif grid3(int label) {
  Motif m;
  m.roles.assign(9, label);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (c < 2) m.edges.push_back({r * 3 + c, r * 3 + c + 1});
      if (r < 2) m.edges.push_back({r * 3 + c, (r + 1) * 3 + c});
    }
  }
  return m;
}

// Appends the motif and links its node 0 to a uniformly chosen node of
// [base_first, base_first + base_count).
NodeSet attach_motif(Builder& b, const Motif& motif, int base_first, int base_count, Rng& rng) {
  const int first = b.num_nodes;
  b.num_nodes += static_cast<int>(motif.roles.size());
  b.labels.insert(b.labels.end(), motif.roles.begin(), motif.roles.end());
  for (const Edge& e : motif.edges) b.add_edge(first + e.u, first + e.v);
  const int anchor = base_first + static_cast<int>(uniform_index(rng, base_count));
  b.add_edge(first, anchor);
  NodeSet nodes(motif.roles.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = first + static_cast<int>(i);
  return nodes;
}

void add_random_edges(Builder& b, int count, int lo, int hi, Rng& rng) {
  const auto span = static_cast<std::uint64_t>(hi - lo);
  const std::uint64_t possible = span * (span - 1) / 2;
  int added = 0;
  while (added < count && b.edges.size() < possible) {
    const int x = lo + static_cast<int>(uniform_index(rng, span));
    const int y = lo + static_cast<int>(uniform_index(rng, span));
    if (b.add_edge(x, y)) ++added;
  }
}

DenseMatrix constant_features(int n, int f) { return DenseMatrix::Ones(n, f); }

struct ShapesPart {
  Builder builder;
  std::vector<NodeSet> motifs;
};

ShapesPart ba_shapes_part(const SyntheticSpec& spec, Rng& rng, int role_offset) {
  ShapesPart part;
  barabasi_albert(part.builder, spec.base_size, spec.ba_attach, rng);
  for (int i = 0; i < spec.num_motifs; ++i) {
    part.motifs.push_back(attach_motif(part.builder, house(role_offset), 0, spec.base_size, rng));
  }
  const int extra = static_cast<int>(std::lround(spec.perturb_edge_fraction * part.builder.num_nodes));
  add_random_edges(part.builder, extra, 0, part.builder.num_nodes, rng);
  return part;
}

GroundTruth truth_from(const std::vector<NodeSet>& motifs, int num_items, int motif_size) {
  GroundTruth t;
  t.motifs = motifs;
  t.motif_size = motif_size;
  t.motif_of.assign(num_items, -1);
  for (std::size_t m = 0; m < motifs.size(); ++m) {
    for (NodeId v : motifs[m]) t.motif_of[v] = static_cast<int>(m);
  }
  return t;
}

Dataset build_ba_shapes(const SyntheticSpec& spec, Rng& rng) {
  ShapesPart part = ba_shapes_part(spec, rng, 0);
  const int n = part.builder.num_nodes;
  Dataset d;
  d.graphs.push_back(part.builder.finish(constant_features(n, spec.num_features)));
  d.truth = truth_from(part.motifs, n, 5);
  d.num_classes = 4;
  return d;
}

Dataset build_ba_community(const SyntheticSpec& spec, Rng& rng) {
  ShapesPart first = ba_shapes_part(spec, rng, 0);
  ShapesPart second = ba_shapes_part(spec, rng, 4);
  const int n1 = first.builder.num_nodes;
  Builder b = std::move(first.builder);
  // Community 1 roles 0..3 become labels 4..7; base nodes of community 1 are 4.
  for (std::size_t i = 0; i < second.builder.labels.size(); ++i) {
    const int role = second.builder.labels[i];
    b.labels.push_back(role == 0 ? 4 : role);
  }
  for (const Edge& e : second.builder.edges) b.add_edge(e.u + n1, e.v + n1);
  b.num_nodes += second.builder.num_nodes;
  std::vector<NodeSet> motifs = std::move(first.motifs);
  for (NodeSet m : second.motifs) {
    for (NodeId& v : m) v += n1;
    motifs.push_back(std::move(m));
  }
  const int inter = static_cast<int>(std::lround(spec.perturb_edge_fraction * b.num_nodes));
  for (int added = 0; added < inter;) {
    const int x = static_cast<int>(uniform_index(rng, n1));
    const int y = n1 + static_cast<int>(uniform_index(rng, b.num_nodes - n1));
    if (b.add_edge(x, y)) ++added;
  }
  // Two leading informative columns with community-specific means, the rest
  // standard normal.
  DenseMatrix features(b.num_nodes, spec.num_features);
  for (int v = 0; v < b.num_nodes; ++v) {
    const double mu = v < n1 ? -1.0 : 1.0;
    for (int j = 0; j < spec.num_features; ++j) {
      features(v, j) = j < 2 ? normal(rng, mu, 0.5) : normal(rng);
    }
  }
  Dataset d;
  d.graphs.push_back(b.finish(std::move(features)));
  d.truth = truth_from(motifs, b.num_nodes, 5);
  d.num_classes = 8;
  return d;
}

Dataset build_tree_motifs(const SyntheticSpec& spec, Rng& rng, const Motif& motif) {
  Builder b;
  binary_tree(b, spec.base_size);
  const int tree_nodes = b.num_nodes;
  std::vector<NodeSet> motifs;
  for (int i = 0; i < spec.num_motifs; ++i) {
    motifs.push_back(attach_motif(b, motif, 0, tree_nodes, rng));
  }
  const int extra = static_cast<int>(std::lround(spec.perturb_edge_fraction * b.num_nodes));
  add_random_edges(b, extra, 0, b.num_nodes, rng);
  Dataset d;
  d.graphs.push_back(b.finish(constant_features(b.num_nodes, spec.num_features)));
  d.truth = truth_from(motifs, b.num_nodes, static_cast<int>(motif.roles.size()));
  d.num_classes = 2;
  return d;
}

Dataset build_ba_2motifs(const SyntheticSpec& spec, Rng& rng) {
  Dataset d;
  d.graph_task = true;
  d.num_classes = 2;
  d.truth.motif_size = 5;
  for (int i = 0; i < spec.num_motifs; ++i) {
    const bool is_house = i < spec.num_motifs / 2;
    Builder b;
    barabasi_albert(b, spec.base_size, spec.ba_attach, rng);
    NodeSet motif = attach_motif(b, is_house ? house() : cycle(5, 1), 0, spec.base_size, rng);
    const int extra = static_cast<int>(std::lround(spec.perturb_edge_fraction * b.num_nodes));
    add_random_edges(b, extra, 0, b.num_nodes, rng);
    Graph g = b.finish(constant_features(b.num_nodes, spec.num_features));
    g.node_labels.clear();
    g.graph_label = is_house ? 0 : 1;
    d.graphs.push_back(std::move(g));
    d.truth.motifs.push_back(std::move(motif));
    d.truth.motif_of.push_back(i);
  }
  return d;
}

double draw(const NoiseDistribution& dist, Rng& rng) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BernoulliLike>) {
          return bernoulli(rng, d.p) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, UniformSparse>) {
          const bool on = bernoulli(rng, d.p);
          const double value = uniform01(rng);
          return on ? value : 0.0;
        } else {
          return normal(rng, d.mean, d.sd);
        }
      },
      dist);
}

std::string format_double(double x) { return fmt::format("{}", x); }

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::BAShapes: return "ba-shapes";
    case DatasetKind::BACommunity: return "ba-community";
    case DatasetKind::TreeCycles: return "tree-cycles";
    case DatasetKind::TreeGrid: return "tree-grid";
    case DatasetKind::BA2Motifs: return "ba-2motifs";
  }
  return "unknown";
}

std::optional<DatasetKind> parse_dataset_kind(const std::string& name) {
  for (auto kind : {DatasetKind::BAShapes, DatasetKind::BACommunity, DatasetKind::TreeCycles,
                    DatasetKind::TreeGrid, DatasetKind::BA2Motifs}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

SyntheticSpec SyntheticSpec::defaults(DatasetKind kind) {
  SyntheticSpec s;
  s.kind = kind;
  switch (kind) {
    case DatasetKind::BAShapes:
    case DatasetKind::BACommunity:
      break;
    case DatasetKind::TreeCycles:
      s.base_size = 8;
      s.num_motifs = 60;
      s.perturb_edge_fraction = 0.0;
      break;
    case DatasetKind::TreeGrid:
      s.base_size = 8;
      s.num_motifs = 80;
      s.perturb_edge_fraction = 0.0;
      break;
    case DatasetKind::BA2Motifs:
      s.base_size = 20;
      s.num_motifs = 1000;
      s.perturb_edge_fraction = 0.0;
      s.ba_attach = 1;
      break;
  }
  return s;
}

void SyntheticSpec::validate() const {
  if (base_size < 1 || num_motifs < 1 || ba_attach < 1 || num_features < 1) {
    throw InputError("dataset spec: counts must be >= 1");
  }
  if (!(perturb_edge_fraction >= 0.0 && perturb_edge_fraction < 1.0)) {
    throw InputError("dataset spec: perturb_edge_fraction must lie in [0, 1)");
  }
  const bool ba = kind == DatasetKind::BAShapes || kind == DatasetKind::BACommunity ||
                  kind == DatasetKind::BA2Motifs;
  if (ba && base_size <= ba_attach) {
    throw InputError("dataset spec: BA base size must exceed the attachment count");
  }
  if (!ba && base_size > 20) throw InputError("dataset spec: tree depth must be <= 20");
  if (kind == DatasetKind::BACommunity && num_features < 2) {
    throw InputError("dataset spec: BA-Community needs at least 2 features");
  }
}

const NodeSet* GroundTruth::motif_for_node(NodeId v) const {
  if (v < 0 || v >= static_cast<int>(motif_of.size()) || motif_of[v] < 0) return nullptr;
  return &motifs[motif_of[v]];
}

int binary_tree_size(int depth) { return (1 << (depth + 1)) - 1; }

Dataset build_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset d;
  switch (spec.kind) {
    case DatasetKind::BAShapes: d = build_ba_shapes(spec, rng); break;
    case DatasetKind::BACommunity: d = build_ba_community(spec, rng); break;
    case DatasetKind::TreeCycles: d = build_tree_motifs(spec, rng, cycle(6, 1)); break;
    case DatasetKind::TreeGrid: d = build_tree_motifs(spec, rng, grid3(1)); break;
    case DatasetKind::BA2Motifs: d = build_ba_2motifs(spec, rng); break;
  }
  d.spec = spec;
  return d;
}

NoisyFeatures add_noisy_features(const Graph& g, double fraction,
                                 const NoiseDistribution& dist, std::uint64_t seed) {
  if (!(fraction > 0.0)) throw InputError("add_noisy_features: fraction must be > 0");
  const int f = g.num_features();
  const int extra = static_cast<int>(std::ceil(fraction * f - 1e-9));
  Rng rng(seed);
  DenseMatrix x(g.num_nodes(), f + extra);
  x.leftCols(f) = g.features();
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int j = 0; j < extra; ++j) x(v, f + j) = draw(dist, rng);
  }
  NoisyFeatures out{g.with_features(std::move(x)), {}};
  for (int j = 0; j < extra; ++j) out.noisy_ids.push_back(f + j);
  return out;
}

NoisyNodes add_noisy_nodes(const Graph& g, double fraction, double connect_prob,
                           const NoiseDistribution& feature_dist, std::uint64_t seed) {
  if (!(fraction > 0.0)) throw InputError("add_noisy_nodes: fraction must be > 0");
  if (!(connect_prob > 0.0 && connect_prob < 1.0)) {
    throw InputError("add_noisy_nodes: connect_prob must lie in (0, 1)");
  }
  const int n = g.num_nodes();
  const int extra = std::max(1, static_cast<int>(std::floor(fraction * n + 1e-9)));
  Rng rng(seed);
  std::vector<Edge> edges = g.edges();
  for (int k = 0; k < extra; ++k) {
    const int id = n + k;
    bool linked = false;
    for (int u = 0; u < n; ++u) {
      if (bernoulli(rng, connect_prob)) {
        edges.push_back({u, id});
        linked = true;
      }
    }
    if (!linked && n > 0) edges.push_back({static_cast<int>(uniform_index(rng, n)), id});
  }
  DenseMatrix x(n + extra, g.num_features());
  x.topRows(n) = g.features();
  for (int k = 0; k < extra; ++k) {
    for (int j = 0; j < g.num_features(); ++j) x(n + k, j) = draw(feature_dist, rng);
  }
  NoisyNodes out{Graph(n + extra, std::move(edges), std::move(x)), {}};
  out.graph.node_labels = g.node_labels;
  if (!out.graph.node_labels.empty()) out.graph.node_labels.resize(n + extra, -1);
  out.graph.graph_label = g.graph_label;
  for (int k = 0; k < extra; ++k) out.noisy_ids.push_back(n + k);
  return out;
}

std::filesystem::path labels_path(const std::filesystem::path& graph_path) {
  return graph_path.string() + ".labels";
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write graph file " + path.string());
  out << g.num_nodes() << ' ' << g.num_features() << '\n';
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int j = 0; j < g.num_features(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(g.features()(v, j));
    }
    out << '\n';
  }
  out << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';

  const auto lpath = labels_path(path);
  if (g.graph_label) {
    std::ofstream lout(lpath);
    lout << "graph " << *g.graph_label << '\n';
  } else if (!g.node_labels.empty()) {
    std::ofstream lout(lpath);
    for (int label : g.node_labels) lout << label << '\n';
  } else {
    std::filesystem::remove(lpath);
  }
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read graph file " + path.string());
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };

  if (!next_line()) throw ParseError("missing header", 1);
  long long n = -1, f = -1;
  {
    std::istringstream header(line);
    std::string rest;
    if (!(header >> n >> f) || n < 0 || f < 0 || (header >> rest)) {
      throw ParseError("header must be 'N F' with non-negative integers", line_no);
    }
  }
  DenseMatrix x(n, f);
  for (long long v = 0; v < n; ++v) {
    if (!next_line()) throw ParseError("expected " + std::to_string(n) + " feature rows", line_no + 1);
    std::istringstream row(line);
    for (long long j = 0; j < f; ++j) {
      std::string token;
      if (!(row >> token)) {
        throw InconsistentDimensions("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(f) + " features");
      }
      try {
        std::size_t used = 0;
        x(v, j) = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + token + "'", line_no);
      }
      if (!std::isfinite(x(v, j))) throw ParseError("non-finite feature", line_no);
    }
    std::string extra;
    if (row >> extra) {
      throw InconsistentDimensions("line " + std::to_string(line_no) + ": more than " +
                                   std::to_string(f) + " features");
    }
  }
  if (next_line() && line.find_first_not_of(" \t\r") != std::string::npos) {
    throw ParseError("expected blank line after feature rows", line_no);
  }
  std::vector<Edge> edges;
  while (next_line()) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long a, b;
    std::string extra;
    if (!(row >> a >> b) || (row >> extra)) throw ParseError("edge must be 'i j'", line_no);
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw ParseError("edge references node outside [0, " + std::to_string(n) + ")", line_no);
    }
    if (a == b) throw ParseError("self-loop", line_no);
    edges.push_back({static_cast<int>(a), static_cast<int>(b)});
  }
  Graph g(static_cast<int>(n), std::move(edges), std::move(x));

  std::ifstream lin(labels_path(path));
  if (lin) {
    std::vector<int> labels;
    int lno = 0;
    while (std::getline(lin, line)) {
      ++lno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream row(line);
      std::string first;
      row >> first;
      if (first == "graph") {
        int label;
        if (!(row >> label)) throw ParseError("labels: bad graph label", lno);
        g.graph_label = label;
        continue;
      }
      try {
        labels.push_back(std::stoi(first));
      } catch (const std::exception&) {
        throw ParseError("labels: bad label '" + first + "'", lno);
      }
    }
    if (!labels.empty()) {
      if (static_cast<long long>(labels.size()) != n) {
        throw InconsistentDimensions("labels file has " + std::to_string(labels.size()) +
                                     " entries for " + std::to_string(n) + " nodes");
      }
      g.node_labels = std::move(labels);
    }
  }
  return g;
}

nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["kind"] = m.kind;
  j["seed"] = m.seed;
  j["num_classes"] = m.num_classes;
  j["graph_task"] = m.graph_task;
  j["graphs"] = nlohmann::json::array();
  for (const auto& p : m.graph_files) j["graphs"].push_back(p.string());
  j["ground_truth"] = {{"motif_size", m.truth.motif_size}, {"motifs", m.truth.motifs}};
  j["noisy_features"] = m.noisy_features;
  j["noisy_nodes"] = m.noisy_nodes;
  j["spec"] = m.spec;
  return j;
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  m.kind = j.value("kind", std::string("custom"));
  m.seed = j.value("seed", std::uint64_t{0});
  m.num_classes = j.value("num_classes", 0);
  m.graph_task = j.value("graph_task", false);
  for (const auto& p : j.at("graphs")) m.graph_files.emplace_back(p.get<std::string>());
  if (j.contains("ground_truth")) {
    m.truth.motif_size = j["ground_truth"].value("motif_size", 0);
    m.truth.motifs = j["ground_truth"].value("motifs", std::vector<NodeSet>{});
  }
  m.noisy_features = j.value("noisy_features", std::vector<int>{});
  m.noisy_nodes = j.value("noisy_nodes", NodeSet{});
  m.spec = j.value("spec", nlohmann::json::object());
  return m;
}

std::filesystem::path write_dataset(const Dataset& data, const std::filesystem::path& dir,
                                    const std::vector<int>& noisy_features,
                                    const NodeSet& noisy_nodes) {
  std::filesystem::create_directories(dir);
  Manifest m;
  m.kind = to_string(data.spec.kind);
  m.seed = data.spec.seed;
  m.num_classes = data.num_classes;
  m.graph_task = data.graph_task;
  m.truth = data.truth;
  m.noisy_features = noisy_features;
  m.noisy_nodes = noisy_nodes;
  m.spec = {{"kind", m.kind},
            {"base_size", data.spec.base_size},
            {"num_motifs", data.spec.num_motifs},
            {"perturb_edge_fraction", data.spec.perturb_edge_fraction},
            {"ba_attach", data.spec.ba_attach},
            {"num_features", data.spec.num_features},
            {"seed", data.spec.seed}};
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    const std::string name = data.graphs.size() == 1 ? "graph.txt" : fmt::format("graph_{:04}.txt", i);
    save_graph(data.graphs[i], dir / name);
    m.graph_files.emplace_back(name);
  }
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << manifest_to_json(m).dump(1) << '\n';
  return path;
}

LoadedDataset load_dataset(const std::filesystem::path& path) {
  LoadedDataset out;
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read manifest " + path.string());
    nlohmann::json j;
    try {
      in >> j;
      out.manifest = manifest_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("manifest " + path.string() + ": " + e.what());
    }
    for (const auto& p : out.manifest.graph_files) {
      out.graphs.push_back(load_graph(p.is_absolute() ? p : path.parent_path() / p));
    }
  } else {
    out.graphs.push_back(load_graph(path));
    out.manifest.kind = "custom";
    out.manifest.graph_files.push_back(path);
    out.manifest.graph_task = out.graphs.front().graph_label.has_value();
  }
  int num_nodes_total = 0;
  for (const Graph& g : out.graphs) num_nodes_total += g.num_nodes();
  if (out.manifest.num_classes == 0) {
    int max_label = -1;
    for (const Graph& g : out.graphs) {
      for (int l : g.node_labels) max_label = std::max(max_label, l);
      if (g.graph_label) max_label = std::max(max_label, *g.graph_label);
    }
    out.manifest.num_classes = max_label + 1;
  }
  // Rebuild the node -> motif index from the motif lists.
  GroundTruth& t = out.manifest.truth;
  if (out.manifest.graph_task) {
    t.motif_of.resize(t.motifs.size());
    for (std::size_t i = 0; i < t.motifs.size(); ++i) t.motif_of[i] = static_cast<int>(i);
  } else {
    t.motif_of.assign(num_nodes_total, -1);
    for (std::size_t m = 0; m < t.motifs.size(); ++m) {
      for (NodeId v : t.motifs[m]) {
        if (v < 0 || v >= num_nodes_total) throw InconsistentDimensions("manifest: motif node out of range");
        t.motif_of[v] = static_cast<int>(m);
      }
    }
  }
  return out;
}

}  // namespace graphsvx
