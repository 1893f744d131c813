#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphsvx/graph.hpp"
#include "graphsvx/tensor.hpp"

namespace graphsvx {

enum class Task { NodeClassification, GraphClassification };

struct DenseLayer {
  DenseMatrix weight;  // in x out
  Vector bias;         // out
};

// Stack of GCN layers H' = ReLU(D^-1/2 (A+I) D^-1/2 H W + b) followed by a
// fully-connected classifier and softmax. Graph classification max-pools the
// last hidden layer over nodes before the classifier.
struct GnnModel {
  std::vector<DenseLayer> layers;
  DenseLayer classifier;
  Task task = Task::NodeClassification;
  int num_classes = 0;
  bool use_bias = true;

  int input_dim() const;
  int num_layers() const { return static_cast<int>(layers.size()); }
  std::vector<int> hidden_dims() const;
  int num_parameters() const;

  // Glorot-uniform weights, zero biases.
  static GnnModel init(int input_dim, const std::vector<int>& hidden_dims,
                       int num_classes, Task task, std::uint64_t seed,
                       bool use_bias = true);

  // Flat parameter view, layer by layer (weight row-major, then bias),
  // classifier last. Biases are skipped when use_bias is false.
  Vector flatten() const;
  void unflatten(const Vector& params);
};

bool operator==(const GnnModel& a, const GnnModel& b);

/// Class probabilities: num_nodes x num_classes for node classification,
/// 1 x num_classes for graph classification. Throws DimensionMismatch.
DenseMatrix gcn_forward(const GnnModel& model, const Graph& g);

/// D^-1/2 (A+I) D^-1/2 h using the graph's adjacency lists.
DenseMatrix propagate(const Graph& g, const DenseMatrix& h);

struct TrainConfig {
  int epochs = 1000;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  // Return the parameters of the epoch with the best validation accuracy
  // (latest among ties) instead of the last epoch.
  bool keep_best_val = true;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct DataSplit {
  std::vector<int> train, val, test;  // node ids or graph indices
};

struct TrainResult {
  GnnModel model;
  DataSplit split;
  std::vector<EpochLog> log;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  int best_epoch = 0;  // epoch whose parameters were returned (0 = initial)
};

/// Seeded shuffle of `items` into train/val/test by the configured fractions.
DataSplit make_split(std::vector<int> items, const TrainConfig& cfg);

/// Full-batch Adam on mean negative log-likelihood over the training split.
/// Node labels of -1 are treated as unlabelled and never enter any split.
TrainResult train(GnnModel model, const Graph& g, const TrainConfig& cfg);
TrainResult train(GnnModel model, std::span<const Graph> graphs,
                  const TrainConfig& cfg);

/// Mean NLL and its analytic gradient (flattened like GnnModel::flatten) over
/// the given nodes (node task) of a single graph.
double loss_and_gradient(const GnnModel& model, const Graph& g,
                         std::span<const int> nodes, const std::vector<int>& labels,
                         Vector* gradient);

/// Max over all parameters of |analytic - fd| / (|analytic| + |fd| + 1e-8),
/// where fd are central differences with step `h`. Uses the graph's labels,
/// or the model's own predictions when the graph is unlabelled.
double grad_check(const GnnModel& model, const Graph& g, double h = 1e-5);

double accuracy(const GnnModel& model, const Graph& g, std::span<const int> nodes);
double accuracy(const GnnModel& model, std::span<const Graph> graphs,
                std::span<const int> indices);

nlohmann::json model_to_json(const GnnModel& model);
GnnModel model_from_json(const nlohmann::json& j);
void save_model(const GnnModel& model, const std::filesystem::path& path);
GnnModel load_model(const std::filesystem::path& path);

}  // namespace graphsvx
