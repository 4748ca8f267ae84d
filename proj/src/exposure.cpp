#include "dprank/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dprank {

PopularityTable popularity(const ImplicitDataset& ds) {
  PopularityTable pop;
  pop.counts = ds.item_counts();
  const int n = pop.num_items();
  const std::int64_t max_count =
      n == 0 ? 0 : *std::max_element(pop.counts.begin(), pop.counts.end());

  pop.normalized.resize(n);
  for (int i = 0; i < n; ++i) {
    pop.normalized[i] =
        max_count > 0
            ? static_cast<double>(pop.counts[i]) / static_cast<double>(max_count)
            : 0.0;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pop.counts[a] != pop.counts[b]) return pop.counts[a] > pop.counts[b];
    return a < b;
  });
  pop.rank.resize(n);
  for (int pos = 0; pos < n; ++pos) pop.rank[order[pos]] = pos + 1;

  const int tail_size = static_cast<int>(std::floor(0.8 * n));
  pop.tail_flag.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (pop.rank[i] > n - tail_size) pop.tail_flag[i] = 1;
  }
  return pop;
}

GammaTable gamma_table(const PopularityTable& pop, double alpha,
                       bool raw_counts) {
  if (alpha < 0.0) throw std::invalid_argument("gamma: alpha must be >= 0");
  GammaTable table;
  table.alpha = alpha;
  table.gamma.resize(pop.num_items());
  for (int i = 0; i < pop.num_items(); ++i) {
    const double base = raw_counts ? static_cast<double>(pop.counts[i])
                                   : pop.normalized[i];
    table.gamma[i] = std::pow(1.0 + base, alpha);
  }
  return table;
}

PropensityTable propensities(const PopularityTable& pop, double exponent,
                             double floor) {
  if (exponent <= 0.0) throw std::invalid_argument("propensities: exponent <= 0");
  if (floor <= 0.0 || floor >= 1.0)
    throw std::invalid_argument("propensities: floor must lie in (0,1)");
  PropensityTable table;
  table.exponent = exponent;
  table.theta_pos.resize(pop.num_items());
  table.theta_neg.resize(pop.num_items());
  for (int i = 0; i < pop.num_items(); ++i) {
    const double p = pop.normalized[i];
    table.theta_pos[i] = std::clamp(std::pow(p, exponent), floor, 1.0);
    table.theta_neg[i] = std::clamp(std::pow(1.0 - p, exponent), floor, 1.0);
  }
  return table;
}

ExposureVector exposure_step(const std::vector<double>& relevance,
                             int num_users, int num_items,
                             const ExposureVector& prev) {
  if (static_cast<int>(prev.probs.size()) != num_items ||
      relevance.size() != static_cast<std::size_t>(num_users) * num_items)
    throw std::invalid_argument("exposure_step: shape mismatch");

  ExposureVector next;
  next.probs.assign(num_items, 0.0);
  for (int i = 0; i < num_items; ++i) {
    double col_sum = 0.0;
    for (int u = 0; u < num_users; ++u)
      col_sum += relevance[static_cast<std::size_t>(u) * num_items + i];
    next.probs[i] = col_sum * prev.probs[i];
  }
  const double total =
      std::accumulate(next.probs.begin(), next.probs.end(), 0.0);
  if (total <= 0.0) throw std::runtime_error("degenerate exposure");
  for (double& p : next.probs) p /= total;
  return next;
}

std::vector<double> exposure_distribution(const ImplicitDataset& ds,
                                          int num_groups) {
  if (num_groups < 1)
    throw std::invalid_argument("exposure_distribution: num_groups < 1");
  const auto pop = popularity(ds);
  const int n = ds.num_items();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pop.rank[a] < pop.rank[b]; });

  const double total = static_cast<double>(ds.num_positives());
  std::vector<double> shares(num_groups, 0.0);
  if (total == 0.0) return shares;
  // Equal-size buckets; any remainder pads the leading (most popular) groups.
  const int base = n / num_groups;
  const int extra = n % num_groups;
  int pos = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    std::int64_t count = 0;
    for (int k = 0; k < size; ++k) count += pop.counts[order[pos++]];
    shares[g] = static_cast<double>(count) / total;
  }
  return shares;
}

}  // namespace dprank
