#include "graphsvx/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "graphsvx/errors.hpp"
#include "graphsvx/random.hpp"

namespace graphsvx {
namespace {

constexpr int kModelSchemaVersion = 1;

DenseLayer glorot_layer(int in, int out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  DenseLayer layer{DenseMatrix(in, out), Vector::Zero(out)};
  for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
    layer.weight.data()[i] = uniform(rng, -limit, limit);
  }
  return layer;
}

void softmax_rows(DenseMatrix& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

// Activations kept for backpropagation.
struct ForwardPass {
  std::vector<DenseMatrix> inputs;  // H^(l) fed into layer l
  std::vector<DenseMatrix> pre;     // pre-activation Z^(l)
  DenseMatrix hidden;               // ReLU(Z^(L-1))
  DenseMatrix pooled;               // 1 x H, graph task only
  std::vector<Eigen::Index> argmax; // per hidden column, graph task only
  DenseMatrix probs;
};

ForwardPass run_forward(const GnnModel& model, const Graph& g) {
  if (model.layers.empty()) throw DimensionMismatch("gcn_forward: model has no layers");
  if (g.num_features() != model.input_dim()) {
    throw DimensionMismatch("gcn_forward: graph has " +
                            std::to_string(g.num_features()) +
                            " features, model expects " +
                            std::to_string(model.input_dim()));
  }
  ForwardPass pass;
  DenseMatrix h = g.features();
  for (const DenseLayer& layer : model.layers) {
    DenseMatrix z = propagate(g, h * layer.weight);
    if (model.use_bias) z.rowwise() += layer.bias.transpose();
    pass.inputs.push_back(std::move(h));
    h = z.cwiseMax(0.0);
    pass.pre.push_back(std::move(z));
  }
  pass.hidden = std::move(h);

  DenseMatrix logits;
  if (model.task == Task::NodeClassification) {
    logits = pass.hidden * model.classifier.weight;
  } else {
    const auto width = pass.hidden.cols();
    pass.pooled = DenseMatrix::Zero(1, width);
    pass.argmax.assign(width, 0);
    if (pass.hidden.rows() > 0) {
      for (Eigen::Index c = 0; c < width; ++c) {
        Eigen::Index best = 0;
        pass.pooled(0, c) = pass.hidden.col(c).maxCoeff(&best);
        pass.argmax[c] = best;
      }
    }
    logits = pass.pooled * model.classifier.weight;
  }
  if (model.use_bias) logits.rowwise() += model.classifier.bias.transpose();
  softmax_rows(logits);
  pass.probs = std::move(logits);
  return pass;
}

// Backpropagates dL/dlogits through the network, accumulating into `grads`
// (same layout as GnnModel).
void backward(const GnnModel& model, const Graph& g, const ForwardPass& pass,
              const DenseMatrix& dlogits, GnnModel& grads) {
  DenseMatrix dhidden;
  if (model.task == Task::NodeClassification) {
    grads.classifier.weight += pass.hidden.transpose() * dlogits;
    grads.classifier.bias += dlogits.colwise().sum().transpose();
    dhidden = dlogits * model.classifier.weight.transpose();
  } else {
    grads.classifier.weight += pass.pooled.transpose() * dlogits;
    grads.classifier.bias += dlogits.colwise().sum().transpose();
    const DenseMatrix dpooled = dlogits * model.classifier.weight.transpose();
    dhidden = DenseMatrix::Zero(pass.hidden.rows(), pass.hidden.cols());
    if (pass.hidden.rows() > 0) {
      for (Eigen::Index c = 0; c < pass.hidden.cols(); ++c) {
        dhidden(pass.argmax[c], c) += dpooled(0, c);
      }
    }
  }
  for (int l = model.num_layers() - 1; l >= 0; --l) {
    const DenseMatrix dz =
        dhidden.cwiseProduct((pass.pre[l].array() > 0.0).cast<double>().matrix());
    // The normalised adjacency is symmetric, so its transpose is itself.
    const DenseMatrix dprop = propagate(g, dz);
    grads.layers[l].weight += pass.inputs[l].transpose() * dprop;
    grads.layers[l].bias += dz.colwise().sum().transpose();
    if (l > 0) dhidden = dprop * model.layers[l].weight.transpose();
  }
}

GnnModel zeros_like(const GnnModel& model) {
  GnnModel z = model;
  for (auto& layer : z.layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  z.classifier.weight.setZero();
  z.classifier.bias.setZero();
  return z;
}

double nll_rows(const DenseMatrix& probs, std::span<const int> rows,
                const std::vector<int>& labels, double scale, DenseMatrix* dlogits) {
  double loss = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int r = rows[k];
    const int y = labels[k];
    loss -= std::log(std::max(probs(r, y), 1e-300));
    if (dlogits != nullptr) {
      dlogits->row(r) += probs.row(r) * scale;
      (*dlogits)(r, y) -= scale;
    }
  }
  return loss * scale;
}

std::vector<int> labelled_nodes(const Graph& g) {
  if (g.node_labels.empty()) throw MissingLabels("train: graph has no node labels");
  std::vector<int> nodes;
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (g.node_labels[i] >= 0) nodes.push_back(i);
  }
  if (nodes.empty()) throw MissingLabels("train: every node is unlabelled");
  return nodes;
}

struct Adam {
  explicit Adam(Eigen::Index n, double lr) : m(Vector::Zero(n)), v(Vector::Zero(n)), lr(lr) {}

  void step(Vector& params, const Vector& grad) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }

  Vector m, v;
  double lr;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int t = 0;
};

void check_split_fractions(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("train: learning rate must be positive");
  }
  const double total = cfg.train_fraction + cfg.val_fraction + cfg.test_fraction;
  if (cfg.train_fraction <= 0.0 || cfg.val_fraction < 0.0 ||
      cfg.test_fraction < 0.0 || std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("train: split fractions must be positive and sum to 1");
  }
}

}  // namespace

int GnnModel::input_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.rows());
}

std::vector<int> GnnModel::hidden_dims() const {
  std::vector<int> dims;
  for (const auto& layer : layers) dims.push_back(static_cast<int>(layer.weight.cols()));
  return dims;
}

int GnnModel::num_parameters() const { return static_cast<int>(flatten().size()); }

GnnModel GnnModel::init(int input_dim, const std::vector<int>& hidden_dims,
                        int num_classes, Task task, std::uint64_t seed,
                        bool use_bias) {
  if (input_dim < 1 || num_classes < 1 || hidden_dims.empty()) {
    throw std::invalid_argument("GnnModel::init: dimensions must be positive");
  }
  Rng rng(seed);
  GnnModel model;
  model.task = task;
  model.num_classes = num_classes;
  model.use_bias = use_bias;
  int in = input_dim;
  for (int width : hidden_dims) {
    if (width < 1) throw std::invalid_argument("GnnModel::init: hidden width must be positive");
    model.layers.push_back(glorot_layer(in, width, rng));
    in = width;
  }
  model.classifier = glorot_layer(in, num_classes, rng);
  return model;
}

Vector GnnModel::flatten() const {
  std::vector<double> out;
  auto push = [&](const DenseLayer& layer) {
    out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    if (use_bias) out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  };
  for (const auto& layer : layers) push(layer);
  push(classifier);
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

void GnnModel::unflatten(const Vector& params) {
  Eigen::Index pos = 0;
  auto pull = [&](DenseLayer& layer) {
    std::copy_n(params.data() + pos, layer.weight.size(), layer.weight.data());
    pos += layer.weight.size();
    if (use_bias) {
      std::copy_n(params.data() + pos, layer.bias.size(), layer.bias.data());
      pos += layer.bias.size();
    }
  };
  for (auto& layer : layers) pull(layer);
  pull(classifier);
  if (pos != params.size()) throw DimensionMismatch("GnnModel::unflatten: size mismatch");
}

bool operator==(const GnnModel& a, const GnnModel& b) {
  if (a.task != b.task || a.num_classes != b.num_classes ||
      a.use_bias != b.use_bias || a.layers.size() != b.layers.size()) {
    return false;
  }
  auto same = [](const DenseLayer& x, const DenseLayer& y) {
    return x.weight.rows() == y.weight.rows() && x.weight.cols() == y.weight.cols() &&
           x.weight == y.weight && x.bias.size() == y.bias.size() && x.bias == y.bias;
  };
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (!same(a.layers[i], b.layers[i])) return false;
  }
  return same(a.classifier, b.classifier);
}

DenseMatrix propagate(const Graph& g, const DenseMatrix& h) {
  const int n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g.degree(i) + 1.0);
  DenseMatrix out(n, h.cols());
  for (int i = 0; i < n; ++i) {
    auto row = out.row(i);
    row = h.row(i) * inv_sqrt[i];
    for (NodeId j : g.neighbors(i)) row += h.row(j) * inv_sqrt[j];
    row *= inv_sqrt[i];
  }
  return out;
}

DenseMatrix gcn_forward(const GnnModel& model, const Graph& g) {
  return run_forward(model, g).probs;
}

double loss_and_gradient(const GnnModel& model, const Graph& g,
                         std::span<const int> nodes, const std::vector<int>& labels,
                         Vector* gradient) {
  if (model.task != Task::NodeClassification) {
    throw std::invalid_argument("loss_and_gradient: node task only");
  }
  const ForwardPass pass = run_forward(model, g);
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(nodes.size(), 1));
  if (gradient == nullptr) return nll_rows(pass.probs, nodes, labels, scale, nullptr);
  DenseMatrix dlogits = DenseMatrix::Zero(pass.probs.rows(), pass.probs.cols());
  const double loss = nll_rows(pass.probs, nodes, labels, scale, &dlogits);
  GnnModel grads = zeros_like(model);
  backward(model, g, pass, dlogits, grads);
  *gradient = grads.flatten();
  return loss;
}

namespace {

double graph_loss_and_gradient(const GnnModel& model, std::span<const Graph> graphs,
                               std::span<const int> indices, Vector* gradient) {
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(indices.size(), 1));
  GnnModel grads = zeros_like(model);
  double loss = 0.0;
  const int row0[] = {0};
  for (int idx : indices) {
    const Graph& g = graphs[idx];
    const ForwardPass pass = run_forward(model, g);
    const std::vector<int> label{*g.graph_label};
    DenseMatrix dlogits = DenseMatrix::Zero(1, pass.probs.cols());
    loss += nll_rows(pass.probs, row0, label, scale, gradient ? &dlogits : nullptr);
    if (gradient != nullptr) backward(model, g, pass, dlogits, grads);
  }
  if (gradient != nullptr) *gradient = grads.flatten();
  return loss;
}

Eigen::Index argmax_row(const DenseMatrix& probs, Eigen::Index r) {
  Eigen::Index best = 0;
  probs.row(r).maxCoeff(&best);
  return best;
}

}  // namespace

DataSplit make_split(std::vector<int> items, const TrainConfig& cfg) {
  Rng rng(cfg.seed ^ 0x5eed5eedULL);
  shuffle(items, rng);
  const auto n = items.size();
  auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * n));
  auto n_val = static_cast<std::size_t>(std::llround(cfg.val_fraction * n));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);
  DataSplit split;
  split.train.assign(items.begin(), items.begin() + n_train);
  split.val.assign(items.begin() + n_train, items.begin() + n_train + n_val);
  split.test.assign(items.begin() + n_train + n_val, items.end());
  return split;
}

double accuracy(const GnnModel& model, const Graph& g, std::span<const int> nodes) {
  if (nodes.empty()) return 0.0;
  const DenseMatrix probs = gcn_forward(model, g);
  int hits = 0;
  for (int v : nodes) hits += argmax_row(probs, v) == g.node_labels[v];
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

double accuracy(const GnnModel& model, std::span<const Graph> graphs,
                std::span<const int> indices) {
  if (indices.empty()) return 0.0;
  int hits = 0;
  for (int idx : indices) {
    hits += argmax_row(gcn_forward(model, graphs[idx]), 0) == *graphs[idx].graph_label;
  }
  return static_cast<double>(hits) / static_cast<double>(indices.size());
}

TrainResult train(GnnModel model, const Graph& g, const TrainConfig& cfg) {
  check_split_fractions(cfg);
  if (model.task != Task::NodeClassification) {
    throw std::invalid_argument("train: graph-classification model needs a list of graphs");
  }
  TrainResult result;
  result.split = make_split(labelled_nodes(g), cfg);
  std::vector<int> labels;
  for (int v : result.split.train) labels.push_back(g.node_labels[v]);

  Vector params = model.flatten();
  Vector best = params;
  double best_val = -1.0;
  Adam adam(params.size(), cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Vector grad;
    const double loss = loss_and_gradient(model, g, result.split.train, labels, &grad);
    if (cfg.weight_decay > 0.0) grad += cfg.weight_decay * params;
    adam.step(params, grad);
    model.unflatten(params);
    const DenseMatrix probs = gcn_forward(model, g);
    auto acc = [&](const std::vector<int>& nodes) {
      if (nodes.empty()) return 0.0;
      int hits = 0;
      for (int v : nodes) hits += argmax_row(probs, v) == g.node_labels[v];
      return static_cast<double>(hits) / static_cast<double>(nodes.size());
    };
    const EpochLog entry{epoch + 1, loss, acc(result.split.train), acc(result.split.val)};
    result.log.push_back(entry);
    if (entry.val_accuracy >= best_val) {
      best_val = entry.val_accuracy;
      best = params;
      result.best_epoch = entry.epoch;
    }
  }
  if (cfg.keep_best_val && !result.split.val.empty() && cfg.epochs > 0) {
    model.unflatten(best);
  } else {
    result.best_epoch = cfg.epochs;
  }
  result.train_accuracy = accuracy(model, g, result.split.train);
  result.val_accuracy = accuracy(model, g, result.split.val);
  result.test_accuracy = accuracy(model, g, result.split.test);
  result.model = std::move(model);
  return result;
}

TrainResult train(GnnModel model, std::span<const Graph> graphs, const TrainConfig& cfg) {
  check_split_fractions(cfg);
  if (model.task != Task::GraphClassification) {
    throw std::invalid_argument("train: node-classification model needs a single graph");
  }
  std::vector<int> indices;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (!graphs[i].graph_label) {
      throw MissingLabels("train: graph " + std::to_string(i) + " has no label");
    }
    indices.push_back(static_cast<int>(i));
  }
  if (indices.empty()) throw MissingLabels("train: no graphs");
  TrainResult result;
  result.split = make_split(std::move(indices), cfg);

  Vector params = model.flatten();
  Vector best = params;
  double best_val = -1.0;
  Adam adam(params.size(), cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Vector grad;
    const double loss = graph_loss_and_gradient(model, graphs, result.split.train, &grad);
    if (cfg.weight_decay > 0.0) grad += cfg.weight_decay * params;
    adam.step(params, grad);
    model.unflatten(params);
    const EpochLog entry{epoch + 1, loss, accuracy(model, graphs, result.split.train),
                         accuracy(model, graphs, result.split.val)};
    result.log.push_back(entry);
    if (entry.val_accuracy >= best_val) {
      best_val = entry.val_accuracy;
      best = params;
      result.best_epoch = entry.epoch;
    }
  }
  if (cfg.keep_best_val && !result.split.val.empty() && cfg.epochs > 0) {
    model.unflatten(best);
  } else {
    result.best_epoch = cfg.epochs;
  }
  result.train_accuracy = accuracy(model, graphs, result.split.train);
  result.val_accuracy = accuracy(model, graphs, result.split.val);
  result.test_accuracy = accuracy(model, graphs, result.split.test);
  result.model = std::move(model);
  return result;
}

double grad_check(const GnnModel& model, const Graph& g, double h) {
  Vector analytic;
  std::function<double(const Vector&)> objective;
  std::vector<int> nodes(g.num_nodes());
  std::iota(nodes.begin(), nodes.end(), 0);
  std::vector<int> labels;

  if (model.task == Task::NodeClassification) {
    const DenseMatrix probs = gcn_forward(model, g);
    for (int v : nodes) {
      labels.push_back(g.node_labels.empty() || g.node_labels[v] < 0
                           ? static_cast<int>(argmax_row(probs, v))
                           : g.node_labels[v]);
    }
    loss_and_gradient(model, g, nodes, labels, &analytic);
    objective = [&](const Vector& p) {
      GnnModel probe = model;
      probe.unflatten(p);
      return loss_and_gradient(probe, g, nodes, labels, nullptr);
    };
  } else {
    Graph labelled = g;
    if (!labelled.graph_label) {
      labelled.graph_label = static_cast<int>(argmax_row(gcn_forward(model, g), 0));
    }
    const std::vector<Graph> one{labelled};
    const int idx[] = {0};
    graph_loss_and_gradient(model, one, idx, &analytic);
    objective = [&, one](const Vector& p) {
      GnnModel probe = model;
      probe.unflatten(p);
      return graph_loss_and_gradient(probe, one, idx, nullptr);
    };
  }
  const Vector numeric = finite_diff_grad(objective, model.flatten(), h);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double f = numeric[i];
    worst = std::max(worst, std::abs(a - f) / (std::abs(a) + std::abs(f) + 1e-8));
  }
  return worst;
}

nlohmann::json model_to_json(const GnnModel& model) {
  auto layer_json = [](const DenseLayer& layer) {
    nlohmann::json j;
    j["rows"] = layer.weight.rows();
    j["cols"] = layer.weight.cols();
    j["weight"] = std::vector<double>(layer.weight.data(),
                                      layer.weight.data() + layer.weight.size());
    j["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    return j;
  };
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["task"] = model.task == Task::NodeClassification ? "node" : "graph";
  j["num_classes"] = model.num_classes;
  j["use_bias"] = model.use_bias;
  j["layers"] = nlohmann::json::array();
  for (const auto& layer : model.layers) j["layers"].push_back(layer_json(layer));
  j["classifier"] = layer_json(model.classifier);
  return j;
}

GnnModel model_from_json(const nlohmann::json& j) {
  auto layer_from = [](const nlohmann::json& lj) {
    const auto rows = lj.at("rows").get<Eigen::Index>();
    const auto cols = lj.at("cols").get<Eigen::Index>();
    const auto w = lj.at("weight").get<std::vector<double>>();
    const auto b = lj.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != cols) {
      throw InconsistentDimensions("model: layer size does not match its shape");
    }
    DenseLayer layer{DenseMatrix(rows, cols), Vector(cols)};
    std::copy(w.begin(), w.end(), layer.weight.data());
    std::copy(b.begin(), b.end(), layer.bias.data());
    return layer;
  };
  GnnModel model;
  const auto task = j.at("task").get<std::string>();
  if (task != "node" && task != "graph") throw InputError("model: unknown task " + task);
  model.task = task == "node" ? Task::NodeClassification : Task::GraphClassification;
  model.num_classes = j.at("num_classes").get<int>();
  model.use_bias = j.at("use_bias").get<bool>();
  for (const auto& lj : j.at("layers")) model.layers.push_back(layer_from(lj));
  model.classifier = layer_from(j.at("classifier"));
  for (std::size_t i = 1; i < model.layers.size(); ++i) {
    if (model.layers[i].weight.rows() != model.layers[i - 1].weight.cols()) {
      throw InconsistentDimensions("model: layer widths do not chain");
    }
  }
  if (model.layers.empty() ||
      model.classifier.weight.rows() != model.layers.back().weight.cols() ||
      model.classifier.weight.cols() != model.num_classes) {
    throw InconsistentDimensions("model: classifier shape mismatch");
  }
  return model;
}

void save_model(const GnnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file " + path.string());
  out << model_to_json(model).dump(1) << '\n';
}

GnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace graphsvx
