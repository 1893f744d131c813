#include "graphsvx/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "graphsvx/errors.hpp"
#include "graphsvx/parallel.hpp"

namespace graphsvx {
namespace {

constexpr int kCsvSchemaVersion = 1;

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

AccuracyReport motif_accuracy(const std::vector<Explanation>& explanations, const GroundTruth& truth) {
  AccuracyReport r;
  long total_hits = 0;
  for (const Explanation& e : explanations) {
    const NodeSet* motif = nullptr;
    int k = 0;
    if (e.target_node) {
      motif = truth.motif_for_node(*e.target_node);
      k = truth.motif_size - 1;
    } else if (e.target_graph && *e.target_graph >= 0 &&
               *e.target_graph < static_cast<int>(truth.motifs.size())) {
      motif = &truth.motifs[*e.target_graph];
      k = truth.motif_size;
    }
    if (!motif) throw TargetNotInMotif("explained target is not part of any motif");
    std::vector<Attribution> ranked = e.phi_nodes;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Attribution& a, const Attribution& b) {
      return a.value != b.value ? a.value > b.value : a.id < b.id;
    });
    int hits = 0;
    for (int i = 0; i < std::min<int>(k, ranked.size()); ++i) {
      if (std::find(motif->begin(), motif->end(), ranked[i].id) != motif->end()) ++hits;
    }
    r.hits.push_back(hits);
    total_hits += hits;
    r.k = k;
  }
  r.num_targets = static_cast<int>(explanations.size());
  r.accuracy = r.num_targets && r.k ? static_cast<double>(total_hits) / (r.k * r.num_targets) : 0.0;
  return r;
}

NoiseReport noise_inclusion(const std::vector<Explanation>& explanations, const std::set<int>& noisy_ids,
                            int k, PlayerKind kind) {
  if (k < 1) throw std::invalid_argument("noise_inclusion: k must be >= 1");
  NoiseReport r;
  r.k = k;
  r.histogram.assign(k + 1, 0);
  double sum = 0.0;
  for (const Explanation& e : explanations) {
    std::vector<Attribution> ranked = kind == PlayerKind::Features ? e.phi_features : e.phi_nodes;
    std::stable_sort(ranked.begin(), ranked.end(), [](const Attribution& a, const Attribution& b) {
      const double x = std::abs(a.value), y = std::abs(b.value);
      return x != y ? x > y : a.id < b.id;
    });
    int noisy = 0;
    for (int i = 0; i < std::min<int>(k, ranked.size()); ++i) noisy += noisy_ids.count(ranked[i].id);
    r.per_target.push_back(noisy);
    ++r.histogram[noisy];
    sum += noisy;
  }
  r.mean = explanations.empty() ? 0.0 : sum / explanations.size();
  return r;
}

std::vector<Explanation> explain_many(const Graph& g, const GnnModel& model, const NodeSet& targets,
                                      const ExplainOptions& opts, int jobs) {
  std::vector<Explanation> out(targets.size());
  ExplainOptions single = opts;
  single.jobs = 1;
  parallel_for(static_cast<int>(targets.size()), jobs,
               [&](int i) { out[i] = explain(g, model, targets[i], single); });
  return out;
}

NodeSet motif_nodes(const GroundTruth& truth) {
  NodeSet nodes;
  for (const NodeSet& m : truth.motifs) nodes.insert(nodes.end(), m.begin(), m.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::vector<AblationRow> ablation_run(const Graph& g, const GnnModel& model, const GroundTruth& truth,
                                      const NodeSet& targets, const std::vector<MaskStrategy>& strategies,
                                      const ExplainOptions& base, int jobs) {
  std::vector<AblationRow> rows;
  for (MaskStrategy s : strategies) {
    ExplainOptions opts = base;
    opts.masks.strategy = s;
    const auto explanations = explain_many(g, model, targets, opts, jobs);
    rows.push_back({to_string(s), opts.masks.num_samples, motif_accuracy(explanations, truth).accuracy});
  }
  return rows;
}

std::vector<TimingRow> timing_run(const Graph& g, const GnnModel& model, const NodeSet& targets,
                                  const std::vector<int>& budgets, const ExplainOptions& base) {
  std::vector<TimingRow> rows;
  for (int p : budgets) {
    ExplainOptions opts = base;
    opts.masks.num_samples = p;
    const auto start = std::chrono::steady_clock::now();
    for (NodeId v : targets) explain(g, model, v, opts);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const int n = static_cast<int>(targets.size());
    rows.push_back({p, n ? elapsed.count() / n : 0.0, n});
  }
  return rows;
}

void write_accuracy_csv(const std::filesystem::path& path, const std::string& dataset,
                        const std::vector<AblationRow>& rows) {
  auto out = open_csv(path);
  out << "schema_version,strategy,dataset,P,accuracy\n";
  for (const auto& r : rows) {
    out << kCsvSchemaVersion << ',' << r.strategy << ',' << dataset << ',' << r.samples << ','
        << r.accuracy << '\n';
  }
}

void write_histogram_csv(const std::filesystem::path& path, const NoiseReport& report) {
  auto out = open_csv(path);
  out << "schema_version,bucket,count\n";
  for (std::size_t b = 0; b < report.histogram.size(); ++b) {
    out << kCsvSchemaVersion << ',' << b << ',' << report.histogram[b] << '\n';
  }
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows) {
  auto out = open_csv(path);
  out << "schema_version,P,seconds\n";
  for (const auto& r : rows) out << kCsvSchemaVersion << ',' << r.samples << ',' << r.mean_seconds << '\n';
}

}  // namespace graphsvx
