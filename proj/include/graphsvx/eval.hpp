#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "graphsvx/datasets.hpp"
#include "graphsvx/explain.hpp"

namespace graphsvx {

struct AccuracyReport {
  std::vector<int> hits;  // per explanation
  double accuracy = 0.0;
  int k = 0;
  int num_targets = 0;
};

/// Top-k node players by signed phi (ties by id) scored against the target's
/// motif, k = motif_size - 1 for node targets and motif_size for graph
/// targets. Throws TargetNotInMotif.
AccuracyReport motif_accuracy(const std::vector<Explanation>& explanations,
                              const GroundTruth& truth);

enum class PlayerKind { Features, Nodes };

struct NoiseReport {
  std::vector<int> histogram;   // index = noisy players among the top k
  std::vector<int> per_target;  // noisy count per explanation
  double mean = 0.0;
  int k = 0;
};

/// Counts noisy players among the top-k of one block ranked by |phi|.
NoiseReport noise_inclusion(const std::vector<Explanation>& explanations,
                            const std::set<int>& noisy_ids, int k, PlayerKind kind);

/// Explains every target; parallel across targets, output in target order.
std::vector<Explanation> explain_many(const Graph& g, const GnnModel& model,
                                      const NodeSet& targets, const ExplainOptions& opts,
                                      int jobs);

/// All motif nodes, ascending.
NodeSet motif_nodes(const GroundTruth& truth);

struct AblationRow {
  std::string strategy;
  int samples = 0;
  double accuracy = 0.0;
};

/// Same model, targets and budget for every strategy.
std::vector<AblationRow> ablation_run(const Graph& g, const GnnModel& model,
                                      const GroundTruth& truth, const NodeSet& targets,
                                      const std::vector<MaskStrategy>& strategies,
                                      const ExplainOptions& base, int jobs);

struct TimingRow {
  int samples = 0;
  double mean_seconds = 0.0;
  int num_targets = 0;
};

/// Mean wall-clock seconds per explanation for each budget, explanations
/// run sequentially.
std::vector<TimingRow> timing_run(const Graph& g, const GnnModel& model, const NodeSet& targets,
                                  const std::vector<int>& budgets, const ExplainOptions& base);

void write_accuracy_csv(const std::filesystem::path& path, const std::string& dataset,
                        const std::vector<AblationRow>& rows);
void write_histogram_csv(const std::filesystem::path& path, const NoiseReport& report);
void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows);

}  // namespace graphsvx
