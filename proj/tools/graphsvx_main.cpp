#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphsvx/datasets.hpp"
#include "graphsvx/errors.hpp"
#include "graphsvx/eval.hpp"
#include "graphsvx/explain.hpp"
#include "graphsvx/gnn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace graphsvx;

namespace {

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kDefaultSeed = 0;

// Parse failures and bad input exit with 2, domain errors with 3.
struct UsageError : InputError {
  using InputError::InputError;
};

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;
};

fs::path resolve_out(const Globals& g, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || g.out_dir.empty()) return p;
  return fs::path(g.out_dir) / p;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<int> read_id_list(const std::string& text) {
  std::vector<int> ids;
  std::string token;
  std::stringstream ss(text);
  while (ss >> token) {
    std::stringstream parts(token);
    std::string item;
    while (std::getline(parts, item, ',')) {
      if (item.empty()) continue;
      try {
        std::size_t used = 0;
        ids.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("not a node id: '" + item + "'");
      }
    }
  }
  return ids;
}

std::vector<int> read_id_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_id_list(buffer.str());
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int default_samples(const std::string& kind) {
  static const std::map<std::string, int> budgets = {
      {"ba-shapes", 400}, {"ba-community", 800}, {"tree-cycles", 1400}, {"tree-grid", 1500}};
  const auto it = budgets.find(kind);
  return it == budgets.end() ? 400 : it->second;
}

// ---------------------------------------------------------------- dataset

struct DatasetArgs {
  std::string kind;
  std::optional<int> base, motifs, features, attach;
  std::optional<double> perturb;
  double noisy_features = 0.0;
  double noisy_nodes = 0.0;
  double connect_prob = 0.01;
  std::string noise = "gaussian";
  std::optional<std::uint64_t> seed;
  std::string out = "data";
};

NoiseDistribution parse_noise(const std::string& name) {
  if (name == "gaussian") return GaussianNoise{};
  if (name == "bernoulli") return BernoulliLike{};
  if (name == "uniform") return UniformSparse{};
  throw UsageError("unknown noise distribution '" + name + "'");
}

int cmd_dataset(const DatasetArgs& a, const Globals& g) {
  const auto kind = parse_dataset_kind(a.kind);
  if (!kind) throw UsageError("unknown dataset kind '" + a.kind + "'");
  SyntheticSpec spec = SyntheticSpec::defaults(*kind);
  if (a.base) spec.base_size = *a.base;
  if (a.motifs) spec.num_motifs = *a.motifs;
  if (a.features) spec.num_features = *a.features;
  if (a.attach) spec.ba_attach = *a.attach;
  if (a.perturb) spec.perturb_edge_fraction = *a.perturb;
  spec.seed = a.seed.value_or(g.seed);
  Dataset data = build_synthetic(spec);

  std::vector<int> noisy_features;
  NodeSet noisy_nodes;
  const NoiseDistribution dist = parse_noise(a.noise);
  if (a.noisy_features > 0.0 || a.noisy_nodes > 0.0) {
    if (data.graph_task) throw UsageError("noise injection needs a node-classification dataset");
  }
  if (a.noisy_features > 0.0) {
    NoisyFeatures nf = add_noisy_features(data.graphs[0], a.noisy_features, dist, spec.seed + 1);
    data.graphs[0] = std::move(nf.graph);
    noisy_features = nf.noisy_ids;
  }
  if (a.noisy_nodes > 0.0) {
    NoisyNodes nn = add_noisy_nodes(data.graphs[0], a.noisy_nodes, a.connect_prob, dist, spec.seed + 2);
    data.graphs[0] = std::move(nn.graph);
    noisy_nodes = nn.noisy_ids;
    data.truth.motif_of.resize(data.graphs[0].num_nodes(), -1);
  }

  const fs::path manifest = write_dataset(data, resolve_out(g, a.out), noisy_features, noisy_nodes);
  long nodes = 0, edges = 0;
  for (const Graph& graph : data.graphs) {
    nodes += graph.num_nodes();
    edges += graph.num_edges();
  }
  fmt::print("{}: {} graph(s), {} nodes, {} edges -> {}\n", to_string(*kind), data.graphs.size(), nodes,
             edges, manifest.string());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  int layers = 3;
  int hidden = 20;
  int epochs = 1000;
  double lr = 1e-3;
  double weight_decay = 0.0;
  bool last_epoch = false;
  std::optional<std::uint64_t> seed;
  std::string out = "model.json";
  std::string metrics;
};

int cmd_train(const TrainArgs& a, const Globals& g) {
  if (a.layers < 1 || a.hidden < 1) throw UsageError("--layers and --hidden must be positive");
  if (a.epochs < 0) throw UsageError("--epochs must be >= 0");
  const LoadedDataset data = load_dataset(a.data);
  const Graph& first = data.graphs.at(0);
  const bool graph_task = data.manifest.graph_task;
  const std::uint64_t seed = a.seed.value_or(g.seed);

  GnnModel model = GnnModel::init(first.num_features(), std::vector<int>(a.layers, a.hidden),
                                  data.manifest.num_classes,
                                  graph_task ? Task::GraphClassification : Task::NodeClassification, seed);
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.learning_rate = a.lr;
  cfg.weight_decay = a.weight_decay;
  cfg.seed = seed;
  cfg.keep_best_val = !a.last_epoch;
  const TrainResult r = graph_task ? train(model, std::span<const Graph>(data.graphs), cfg)
                                   : train(model, first, cfg);

  const fs::path model_path = resolve_out(g, a.out);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  save_model(r.model, model_path);

  json log = json::array();
  for (const EpochLog& e : r.log) {
    log.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_accuracy", e.train_accuracy},
                   {"val_accuracy", e.val_accuracy}});
  }
  const json metrics = {{"schema_version", kSchemaVersion},
                        {"model", model_path.string()},
                        {"epochs", a.epochs},
                        {"learning_rate", a.lr},
                        {"seed", seed},
                        {"best_epoch", r.best_epoch},
                        {"train_accuracy", r.train_accuracy},
                        {"val_accuracy", r.val_accuracy},
                        {"test_accuracy", r.test_accuracy},
                        {"split", {{"train", r.split.train}, {"val", r.split.val}, {"test", r.split.test}}},
                        {"log", log}};
  fs::path metrics_path = a.metrics.empty() ? fs::path(model_path).replace_extension(".metrics.json")
                                            : resolve_out(g, a.metrics);
  write_json(metrics_path, metrics);
  fmt::print("train {:.4f}  val {:.4f}  test {:.4f}  (best epoch {})\n", r.train_accuracy, r.val_accuracy,
             r.test_accuracy, r.best_epoch);
  return 0;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string model, data;
  std::optional<int> node, graph;
  std::string nodes_file;
  std::string strategy = "smarterseparate";
  std::optional<int> samples;
  int max_order = 4;
  std::optional<double> feature_share;
  double anchor_weight = 1e6;
  bool full_kernel = false;
  double lambda = 1.0;
  std::optional<double> alpha;
  std::string fit = "wlr";
  std::optional<double> lasso_penalty;
  bool indirect_effect = false;
  std::string path_fill = "mc-mean";
  bool random_paths = false;
  std::optional<int> contrast_node;
  std::string global_nodes;
  bool global_features = false;
  std::string graph_players = "nodes";
  std::optional<std::uint64_t> seed;
  std::string out;
  bool oracle = false;
  int jobs = 1;
};

ExplainOptions build_explain_options(const ExplainArgs& a, const Globals& g, const std::string& kind,
                                     bool graph_task) {
  ExplainOptions o;
  const auto strategy = parse_mask_strategy(a.strategy);
  if (!strategy) throw UsageError("unknown strategy '" + a.strategy + "'");
  o.masks.strategy = *strategy;
  o.masks.num_samples = a.samples.value_or(default_samples(kind));
  o.masks.max_order = a.max_order;
  o.masks.feature_share = a.feature_share;
  o.masks.anchor_weight = a.anchor_weight;
  o.masks.scope = a.full_kernel ? KernelScope::Full : KernelScope::Block;
  o.masks.seed = a.seed.value_or(g.seed);
  o.lambda = a.lambda;
  o.indirect_effect = a.indirect_effect;
  if (a.path_fill == "mc-mean") o.path_fill = PathNodeFill::MonteCarloMean;
  else if (a.path_fill == "explained-node") o.path_fill = PathNodeFill::ExplainedNode;
  else throw UsageError("unknown --path-fill '" + a.path_fill + "'");
  o.random_paths = a.random_paths;
  const auto fit = parse_fit_kind(a.fit);
  if (!fit) throw UsageError("unknown fit '" + a.fit + "'");
  o.fit.kind = *fit;
  o.fit.lasso_penalty = a.lasso_penalty;
  o.alpha = a.alpha;
  o.jobs = a.jobs;
  if (a.graph_players == "nodes") o.graph_players = GraphPlayers::Nodes;
  else if (a.graph_players == "features") o.graph_players = GraphPlayers::Features;
  else throw UsageError("unknown --graph-players '" + a.graph_players + "'");

  if (graph_task) {
    o.mode = PerturbMode::GraphTask;
  } else if (!a.global_nodes.empty()) {
    o.mode = PerturbMode::GlobalNodeSet;
    o.global_nodes = read_id_list(a.global_nodes);
  } else if (a.contrast_node) {
    o.mode = PerturbMode::Contrastive;
    o.contrast_node = *a.contrast_node;
  } else if (a.global_features) {
    o.mode = PerturbMode::GlobalSubgraphFeatures;
  }
  return o;
}

json explain_one(const Graph& graph, const GnnModel& model, std::optional<NodeId> node,
                 std::optional<int> graph_index, const ExplainOptions& opts, bool oracle) {
  if (node && (*node < 0 || *node >= graph.num_nodes())) {
    throw UsageError(fmt::format("node {} out of range [0, {})", *node, graph.num_nodes()));
  }
  const ExplainContext ctx(graph, model, node, opts);
  Explanation e = explain(ctx, opts);
  if (graph_index) e.target_graph = *graph_index;
  if (e.r_squared < 0.90) {
    fmt::print(stderr, "warning: surrogate R^2 = {:.3f} is below 0.90\n", e.r_squared);
  }
  json j = to_json(e);
  if (oracle) {
    const ShapleyValues exact = explain_oracle(ctx);
    const std::vector<double> phi = e.phi();
    double deviation = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) deviation = std::max(deviation, std::abs(phi[i] - exact.phi[i]));
    j["oracle"] = {{"base_value", exact.base_value}, {"phi", exact.phi}, {"max_deviation", deviation}};
  }
  return j;
}

int cmd_explain(const ExplainArgs& a, const Globals& g) {
  const int targets = (a.node ? 1 : 0) + (a.graph ? 1 : 0) + (a.nodes_file.empty() ? 0 : 1);
  if (targets > 1) throw UsageError("give only one of --node, --graph, --nodes-file");
  const LoadedDataset data = load_dataset(a.data);
  const GnnModel model = load_model(a.model);
  const bool graph_task = model.task == Task::GraphClassification;
  if (graph_task && !a.graph) throw UsageError("graph-classification models need --graph");
  if (!graph_task && a.graph) throw UsageError("--graph needs a graph-classification model");
  if (!graph_task && targets == 0 && a.global_nodes.empty()) {
    throw UsageError("give --node, --nodes-file or --global-nodes");
  }
  const ExplainOptions opts = build_explain_options(a, g, data.manifest.kind, graph_task);

  json result;
  if (graph_task) {
    if (*a.graph < 0 || *a.graph >= static_cast<int>(data.graphs.size())) {
      throw UsageError(fmt::format("graph {} out of range", *a.graph));
    }
    result = explain_one(data.graphs[*a.graph], model, std::nullopt, *a.graph, opts, a.oracle);
  } else if (!a.nodes_file.empty()) {
    const std::vector<int> nodes = read_id_file(a.nodes_file);
    const Graph& graph = data.graphs.at(0);
    for (int v : nodes) {
      if (v < 0 || v >= graph.num_nodes()) throw UsageError(fmt::format("node {} out of range", v));
    }
    std::vector<Explanation> many = explain_many(graph, model, nodes, opts, a.jobs);
    json list = json::array();
    for (const Explanation& e : many) list.push_back(to_json(e));
    result = {{"schema_version", kSchemaVersion}, {"explanations", list}};
  } else {
    std::optional<NodeId> node = a.node;
    result = explain_one(data.graphs.at(0), model, node, std::nullopt, opts, a.oracle);
  }

  if (a.out.empty()) {
    std::cout << result.dump(2) << '\n';
  } else {
    write_json(resolve_out(g, a.out), result);
  }
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string mode;
  std::string model, data;
  std::string strategies = "smarterseparate";
  std::optional<int> samples;
  std::string budgets = "100,200,400,800";
  double lambda = 1.0;
  bool indirect_effect = false;
  std::string nodes_file;
  int max_targets = 0;
  int k = 10;
  std::string players = "features";
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

NodeSet eval_targets(const EvalArgs& a, const LoadedDataset& data, std::uint64_t seed) {
  NodeSet targets = a.nodes_file.empty() ? motif_nodes(data.manifest.truth) : read_id_file(a.nodes_file);
  if (a.max_targets > 0 && static_cast<int>(targets.size()) > a.max_targets) {
    std::mt19937_64 rng(seed);
    std::shuffle(targets.begin(), targets.end(), rng);
    targets.resize(a.max_targets);
    std::sort(targets.begin(), targets.end());
  }
  return targets;
}

int cmd_eval(const EvalArgs& a, const Globals& g) {
  static const std::set<std::string> modes = {"accuracy", "noise", "ablation", "timing"};
  if (!modes.count(a.mode)) throw UsageError("unknown --mode '" + a.mode + "'");
  const LoadedDataset data = load_dataset(a.data);
  if (a.mode == "noise" && data.manifest.noisy_features.empty() && data.manifest.noisy_nodes.empty()) {
    throw UsageError("noise mode needs a dataset built with --noisy-features or --noisy-nodes");
  }
  const GnnModel model = load_model(a.model);
  if (model.task != Task::NodeClassification) throw UsageError("eval supports node-classification models");
  const Graph& graph = data.graphs.at(0);
  const std::uint64_t seed = a.seed.value_or(g.seed);

  ExplainOptions base;
  base.masks.num_samples = a.samples.value_or(default_samples(data.manifest.kind));
  base.masks.seed = seed;
  base.lambda = a.lambda;
  base.indirect_effect = a.indirect_effect;

  std::vector<MaskStrategy> strategies;
  for (const std::string& name : split_list(a.strategies)) {
    const auto s = parse_mask_strategy(name);
    if (!s) throw UsageError("unknown strategy '" + name + "'");
    strategies.push_back(*s);
  }
  if (strategies.empty()) throw UsageError("--strategies is empty");
  base.masks.strategy = strategies.front();

  const fs::path out = resolve_out(g, a.out.empty() ? a.mode + ".csv" : a.out);
  const NodeSet targets = eval_targets(a, data, seed);
  if (targets.empty()) throw UsageError("no targets to explain");

  if (a.mode == "accuracy" || a.mode == "ablation") {
    if (a.mode == "accuracy") strategies.resize(1);
    const auto rows = ablation_run(graph, model, data.manifest.truth, targets, strategies, base, a.jobs);
    write_accuracy_csv(out, data.manifest.kind, rows);
    for (const AblationRow& r : rows) fmt::print("{:<16} P={:<6} accuracy {:.4f}\n", r.strategy, r.samples, r.accuracy);
  } else if (a.mode == "noise") {
    const bool features = a.players == "features";
    if (!features && a.players != "nodes") throw UsageError("--players must be features or nodes");
    std::set<int> noisy;
    if (features) noisy.insert(data.manifest.noisy_features.begin(), data.manifest.noisy_features.end());
    else noisy.insert(data.manifest.noisy_nodes.begin(), data.manifest.noisy_nodes.end());
    if (noisy.empty()) throw UsageError("the manifest lists no noisy " + a.players);
    const auto explanations = explain_many(graph, model, targets, base, a.jobs);
    const NoiseReport report =
        noise_inclusion(explanations, noisy, a.k, features ? PlayerKind::Features : PlayerKind::Nodes);
    write_histogram_csv(out, report);
    fmt::print("mean noisy {} in top-{}: {:.4f} over {} targets\n", a.players, a.k, report.mean,
               explanations.size());
  } else {
    std::vector<int> budgets;
    for (const std::string& b : split_list(a.budgets)) budgets.push_back(read_id_list(b).at(0));
    const auto rows = timing_run(graph, model, targets, budgets, base);
    write_timing_csv(out, rows);
    for (const TimingRow& r : rows) fmt::print("P={:<6} {:.6f} s/explanation\n", r.samples, r.mean_seconds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GraphSVX: Shapley-value explanations for graph neural networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with flag values");

  Globals globals;
  if (const char* env = std::getenv("GRAPHSVX_OUT_DIR")) globals.out_dir = env;
  app.add_option("--out-dir", globals.out_dir, "Directory for relative output paths (env GRAPHSVX_OUT_DIR)");
  app.add_option("--global-seed", globals.seed, "Seed used when a command has no --seed");

  DatasetArgs ds;
  auto* dataset = app.add_subcommand("dataset", "Build a synthetic benchmark");
  dataset->add_option("kind", ds.kind, "ba-shapes | ba-community | tree-cycles | tree-grid | ba-2motifs")
      ->required();
  dataset->add_option("--base", ds.base, "BA base size, or tree depth");
  dataset->add_option("--motifs", ds.motifs, "Motif count (graph count for ba-2motifs)");
  dataset->add_option("--features", ds.features, "Feature columns");
  dataset->add_option("--attach", ds.attach, "Edges per new BA node");
  dataset->add_option("--perturb", ds.perturb, "Random edges added, as a fraction of nodes");
  dataset->add_option("--noisy-features", ds.noisy_features, "Fraction of noise columns to append");
  dataset->add_option("--noisy-nodes", ds.noisy_nodes, "Fraction of noise nodes to append");
  dataset->add_option("--connect-prob", ds.connect_prob, "Link probability of noise nodes");
  dataset->add_option("--noise", ds.noise, "gaussian | bernoulli | uniform");
  dataset->add_option("--seed", ds.seed);
  dataset->add_option("--out", ds.out, "Output directory");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a GCN on a dataset");
  train_cmd->add_option("--data", tr.data, "Manifest or graph file")->required();
  train_cmd->add_option("--layers", tr.layers);
  train_cmd->add_option("--hidden", tr.hidden);
  train_cmd->add_option("--epochs", tr.epochs);
  train_cmd->add_option("--lr", tr.lr);
  train_cmd->add_option("--weight-decay", tr.weight_decay);
  train_cmd->add_flag("--last-epoch", tr.last_epoch, "Keep the final parameters, not the best-validation ones");
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--out", tr.out, "Model file");
  train_cmd->add_option("--metrics", tr.metrics, "Metrics JSON (default <model>.metrics.json)");

  ExplainArgs ex;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one prediction");
  explain_cmd->add_option("--model", ex.model)->required();
  explain_cmd->add_option("--data", ex.data)->required();
  explain_cmd->add_option("--node", ex.node);
  explain_cmd->add_option("--graph", ex.graph);
  explain_cmd->add_option("--nodes-file", ex.nodes_file, "Whitespace or comma separated node ids");
  explain_cmd->add_option("--strategy", ex.strategy, "all | random | smart | smartseparate | smarterseparate");
  explain_cmd->add_option("--samples", ex.samples, "Mask budget (default depends on the dataset kind)");
  explain_cmd->add_option("--max-order", ex.max_order);
  explain_cmd->add_option("--feature-share", ex.feature_share);
  explain_cmd->add_option("--anchor-weight", ex.anchor_weight);
  explain_cmd->add_flag("--full-kernel", ex.full_kernel, "Kernel weights over all players for separated masks");
  explain_cmd->add_option("--lambda", ex.lambda, "Feature band width in standard deviations");
  explain_cmd->add_option("--alpha", ex.alpha, "Node share of the explained gap");
  explain_cmd->add_option("--fit", ex.fit, "wlr | lasso");
  explain_cmd->add_option("--lasso-penalty", ex.lasso_penalty);
  explain_cmd->add_flag("--indirect-effect", ex.indirect_effect);
  explain_cmd->add_option("--path-fill", ex.path_fill, "mc-mean | explained-node");
  explain_cmd->add_flag("--random-paths", ex.random_paths);
  explain_cmd->add_option("--contrast-node", ex.contrast_node);
  explain_cmd->add_option("--global-nodes", ex.global_nodes, "Comma separated node ids");
  explain_cmd->add_flag("--global-features", ex.global_features, "Reset features over the receptive field");
  explain_cmd->add_option("--graph-players", ex.graph_players, "nodes | features");
  explain_cmd->add_option("--seed", ex.seed);
  explain_cmd->add_option("--out", ex.out, "Output JSON (stdout when omitted)");
  explain_cmd->add_flag("--oracle", ex.oracle, "Also compute exact Shapley values");
  explain_cmd->add_option("--jobs", ex.jobs)->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy, noise, ablation and timing reports");
  eval_cmd->add_option("--mode", ev.mode, "accuracy | noise | ablation | timing")->required();
  eval_cmd->add_option("--model", ev.model)->required();
  eval_cmd->add_option("--data", ev.data)->required();
  eval_cmd->add_option("--strategies", ev.strategies, "Comma separated strategies");
  eval_cmd->add_option("--samples", ev.samples);
  eval_cmd->add_option("--budgets", ev.budgets, "Comma separated budgets (timing)");
  eval_cmd->add_option("--lambda", ev.lambda);
  eval_cmd->add_flag("--indirect-effect", ev.indirect_effect);
  eval_cmd->add_option("--nodes-file", ev.nodes_file, "Targets (default: every motif node)");
  eval_cmd->add_option("--max-targets", ev.max_targets, "Seeded subsample of the targets");
  eval_cmd->add_option("--k", ev.k, "Top-k for noise mode");
  eval_cmd->add_option("--players", ev.players, "features | nodes (noise mode)");
  eval_cmd->add_option("--seed", ev.seed);
  eval_cmd->add_option("--out", ev.out, "Output CSV");
  eval_cmd->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (dataset->parsed()) return cmd_dataset(ds, globals);
    if (train_cmd->parsed()) return cmd_train(tr, globals);
    if (explain_cmd->parsed()) return cmd_explain(ex, globals);
    if (eval_cmd->parsed()) return cmd_eval(ev, globals);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}
