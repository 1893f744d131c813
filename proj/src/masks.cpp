#include "graphsvx/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "graphsvx/errors.hpp"
#include "graphsvx/random.hpp"

namespace graphsvx {
namespace {

using Bits = std::vector<std::uint8_t>;

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Accumulates unique masks and their weights.
class Collector {
 public:
  Collector(const PlayerIndex& players, const MaskOptions& opts)
      : b_(players.num_features()), d_(players.num_nodes()), opts_(opts) {}

  int num_features() const { return b_; }
  int num_nodes() const { return d_; }
  int total() const { return b_ + d_; }
  int size() const { return batch_.size(); }

  bool add(Bits bits) {
    if (!seen_.insert(bits).second) return false;
    CoalitionMask mask(std::move(bits));
    const double w = weight(mask);
    batch_.masks.push_back(std::move(mask));
    batch_.weights.push_back(w);
    return true;
  }

  void add_anchors() {
    add(Bits(total(), 0));
    add(Bits(total(), 1));
    add(isolated_anchor());
  }

  Bits isolated_anchor() const {
    Bits bits(total(), 0);
    std::fill(bits.begin(), bits.begin() + b_, 1);
    return bits;
  }

  // Embeds a feature-block mask as (z_F, 0_N).
  bool add_feature_block(const Bits& zf) {
    Bits bits(total(), 0);
    std::copy(zf.begin(), zf.end(), bits.begin());
    return add(std::move(bits));
  }

  // Embeds a node-block mask as (1_F, z_N).
  bool add_node_block(const Bits& zn) {
    Bits bits(total(), 1);
    std::copy(zn.begin(), zn.end(), bits.begin() + b_);
    return add(std::move(bits));
  }

  MaskBatch take() { return std::move(batch_); }

 private:
  bool separated() const {
    return opts_.strategy == MaskStrategy::SmartSeparate ||
           opts_.strategy == MaskStrategy::SmarterSeparate;
  }

  double weight(const CoalitionMask& mask) const {
    const double c = opts_.anchor_weight;
    const int m = total();
    const int s = mask.count();
    if (s == 0 || s == m) return c;
    if (!separated()) return kernel_weight(m, s, c);

    const int sf = static_cast<int>(std::count(mask.z.begin(), mask.z.begin() + b_, 1));
    const int sn = s - sf;
    if (sn == 0 && sf == b_) return c;
    if (opts_.scope == KernelScope::Full) return kernel_weight(m, s, c);
    if (sn == 0) return kernel_weight(b_, sf, c);
    return kernel_weight(d_, sn, c);
  }

  int b_;
  int d_;
  MaskOptions opts_;
  std::set<Bits> seen_;
  MaskBatch batch_;
};

Bits random_bits(int m, Rng& rng) {
  Bits bits(m);
  for (auto& b : bits) b = bernoulli(rng, 0.5) ? 1 : 0;
  return bits;
}

// Positions of a uniformly random k-subset of [0, m).
std::vector<int> random_subset(int m, int k, Rng& rng) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, m - i)]);
  }
  idx.resize(k);
  return idx;
}

// A maximum-weight k-subset: every element strictly above the k-th largest
// weight, plus a uniform draw among the elements tied with it.
std::vector<int> max_weight_subset(const std::vector<double>& w, int k, Rng& rng) {
  std::vector<double> sorted = w;
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
  const double threshold = sorted[k - 1];
  std::vector<int> chosen, ties;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    if (w[i] > threshold) chosen.push_back(i);
    else if (w[i] == threshold) ties.push_back(i);
  }
  const int need = k - static_cast<int>(chosen.size());
  for (int i = 0; i < need; ++i) {
    std::swap(ties[i], ties[i + uniform_index(rng, ties.size() - i)]);
    chosen.push_back(ties[i]);
  }
  return chosen;
}

Bits orient(int m, const std::vector<int>& subset, bool ones_on_subset) {
  Bits bits(m, ones_on_subset ? 0 : 1);
  for (int i : subset) bits[i] = ones_on_subset ? 1 : 0;
  return bits;
}

// Budgeted generator over one block of m players. Orders k = 0, 1, ... are
// exhausted (each subset emitted with ones on it and with zeros on it) while
// they fit into 9/10 of the budget; the first order that does not fit is
// sampled, with diversity weighting when `diversity` is set. The remaining
// budget goes to fair-coin masks. `emit` returns true for unseen masks; only
// those count against the budget.
template <typename Emit>
void smart_block(int m, int budget, int max_order, bool diversity, Rng& rng, Emit&& emit) {
  if (m == 0 || budget <= 0) return;
  const int smart_budget = budget * 9 / 10;
  const int fail_limit = 20 * m + 200;
  int produced = 0;
  // Orders beyond m/2 only repeat complements of lower orders.
  const int top_order = std::min(max_order, m / 2);
  for (int k = 0; produced < smart_budget && k <= top_order; ++k) {
    const double count = std::exp(log_binomial(m, k));
    if (produced + 2.0 * count < smart_budget) {
      std::vector<int> subset(k);
      std::iota(subset.begin(), subset.end(), 0);
      while (true) {
        produced += emit(orient(m, subset, true));
        produced += emit(orient(m, subset, false));
        int pos = k - 1;
        while (pos >= 0 && subset[pos] == m - k + pos) --pos;
        if (pos < 0) break;
        ++subset[pos];
        for (int j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      }
      continue;
    }
    std::vector<double> w(m, 1.0);
    int failures = 0;
    while (produced < smart_budget && failures < fail_limit) {
      const std::vector<int> subset =
          diversity ? max_weight_subset(w, k, rng) : random_subset(m, k, rng);
      const bool ones = bernoulli(rng, 0.5);
      if (emit(orient(m, subset, ones))) {
        ++produced;
        failures = 0;
      } else {
        ++failures;
      }
      if (diversity) {
        for (int i : subset) w[i] = 1.0 / (1.0 + 1.0 / w[i]);
      }
    }
    break;
  }
  int failures = 0;
  while (produced < budget && failures < fail_limit) {
    if (emit(random_bits(m, rng))) {
      ++produced;
      failures = 0;
    } else {
      ++failures;
    }
  }
}

}  // namespace

void PlayerIndex::validate() const {
  if (size() == 0) throw EmptyPlayerSet("no players: no retained features and no neighbours");
  auto distinct = [](std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
  };
  if (!distinct(feature_ids)) throw std::invalid_argument("PlayerIndex: duplicate feature id");
  if (!distinct(node_ids)) throw std::invalid_argument("PlayerIndex: duplicate node id");
  if (target && std::find(node_ids.begin(), node_ids.end(), *target) != node_ids.end()) {
    throw std::invalid_argument("PlayerIndex: explained node listed as a player");
  }
}

FeatureMoments feature_moments(const Graph& g) {
  const DenseMatrix& x = g.features();
  FeatureMoments m;
  if (x.rows() == 0) {
    m.mean = Vector::Zero(x.cols());
    m.sd = Vector::Zero(x.cols());
    return m;
  }
  m.mean = x.colwise().mean().transpose();
  m.sd = ((x.rowwise() - m.mean.transpose()).array().square().colwise().sum() /
          static_cast<double>(x.rows()))
             .sqrt()
             .transpose();
  return m;
}

PlayerIndex reduce_players(const Graph& g, const GnnModel& model, NodeId v, double lambda) {
  if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("reduce_players: node out of range");
  if (!(lambda >= 0.0)) throw std::invalid_argument("reduce_players: lambda must be >= 0");
  PlayerIndex p;
  p.target = v;
  p.node_ids = k_hop_neighbors(g, v, model.num_layers());
  const FeatureMoments mom = feature_moments(g);
  for (int j = 0; j < g.num_features(); ++j) {
    const double x = g.features()(v, j);
    const double half = lambda * mom.sd[j];
    if (x < mom.mean[j] - half || x > mom.mean[j] + half) p.feature_ids.push_back(j);
  }
  if (p.size() == 0) {
    throw EmptyPlayerSet("node " + std::to_string(v) +
                         " has no neighbours within reach and no feature outside the band");
  }
  return p;
}

int CoalitionMask::count() const {
  return static_cast<int>(std::count(z.begin(), z.end(), 1));
}

std::string to_string(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::All: return "all";
    case MaskStrategy::Random: return "random";
    case MaskStrategy::Smart: return "smart";
    case MaskStrategy::SmartSeparate: return "smartseparate";
    case MaskStrategy::SmarterSeparate: return "smarterseparate";
  }
  return "unknown";
}

std::optional<MaskStrategy> parse_mask_strategy(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (auto s : {MaskStrategy::All, MaskStrategy::Random, MaskStrategy::Smart,
                 MaskStrategy::SmartSeparate, MaskStrategy::SmarterSeparate}) {
    if (to_string(s) == lower) return s;
  }
  return std::nullopt;
}

double kernel_weight(int m, int s, double c) {
  if (m < 1 || s < 0 || s > m) throw std::invalid_argument("kernel_weight: need 0 <= s <= M, M >= 1");
  if (s == 0 || s == m) return c;
  return std::exp(std::log(m - 1.0) - std::log(static_cast<double>(m)) -
                  std::log(static_cast<double>(s)) - log_binomial(m - 1, s));
}

int feature_budget(int total, int num_features, int num_nodes, std::optional<double> share) {
  if (share) return static_cast<int>(*share * total);
  const int m = num_features + num_nodes;
  if (num_features == 0 || num_nodes == 0) {
    return static_cast<int>(static_cast<double>(total) * num_features / m);
  }
  return static_cast<int>(0.5 * total / 2.0 + 0.5 * total * num_features / static_cast<double>(m));
}

MaskBatch gen_masks(const PlayerIndex& players, const MaskOptions& opts) {
  players.validate();
  if (opts.max_order < 1) throw std::invalid_argument("gen_masks: max_order must be >= 1");
  if (opts.feature_share && !(*opts.feature_share >= 0.0 && *opts.feature_share <= 1.0)) {
    throw std::invalid_argument("gen_masks: feature share must lie in [0, 1]");
  }
  if (!(opts.anchor_weight > 0.0) || !std::isfinite(opts.anchor_weight)) {
    throw std::invalid_argument("gen_masks: anchor weight must be positive and finite");
  }
  const int b = players.num_features();
  const int d = players.num_nodes();
  const int m = b + d;
  const int anchors = (b == 0 || d == 0) ? 2 : 3;
  if (opts.num_samples < anchors + 1) {
    throw BudgetTooSmall("sample budget " + std::to_string(opts.num_samples) + " below " +
                         std::to_string(anchors + 1));
  }

  Collector out(players, opts);
  Rng rng(opts.seed);
  const int budget = opts.num_samples;
  const int fail_limit = 20 * m + 200;

  switch (opts.strategy) {
    case MaskStrategy::All: {
      if (m > 20) throw TooManyPlayers("strategy all needs B+D <= 20, got " + std::to_string(m));
      out.add_anchors();
      for (std::uint32_t s = 0; s < (1u << m); ++s) {
        Bits bits(m);
        for (int i = 0; i < m; ++i) bits[i] = (s >> i) & 1u;
        out.add(std::move(bits));
      }
      break;
    }
    case MaskStrategy::Random: {
      out.add_anchors();
      for (int failures = 0; out.size() < budget && failures < fail_limit;) {
        failures = out.add(random_bits(m, rng)) ? 0 : failures + 1;
      }
      break;
    }
    case MaskStrategy::Smart: {
      out.add_anchors();
      smart_block(m, budget - out.size(), opts.max_order, false, rng,
                  [&](Bits bits) { return out.add(std::move(bits)); });
      break;
    }
    case MaskStrategy::SmartSeparate:
    case MaskStrategy::SmarterSeparate: {
      const bool diversity = opts.strategy == MaskStrategy::SmarterSeparate;
      out.add_anchors();
      const int remaining = budget - out.size();
      const int fbudget = feature_budget(remaining, b, d, opts.feature_share);
      smart_block(b, fbudget, opts.max_order, diversity, rng,
                  [&](const Bits& zf) { return out.add_feature_block(zf); });
      smart_block(d, budget - out.size(), opts.max_order, diversity, rng,
                  [&](const Bits& zn) { return out.add_node_block(zn); });
      // Leftover budget (duplicates, exhausted blocks) goes to random
      // separated masks.
      const double fshare = static_cast<double>(fbudget) / remaining;
      for (int failures = 0; out.size() < budget && failures < fail_limit;) {
        const bool feature_side = d == 0 || (b > 0 && bernoulli(rng, fshare));
        const bool added = feature_side ? out.add_feature_block(random_bits(b, rng))
                                        : out.add_node_block(random_bits(d, rng));
        failures = added ? 0 : failures + 1;
      }
      break;
    }
  }
  return out.take();
}

}  // namespace graphsvx
