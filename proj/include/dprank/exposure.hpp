#pragma once

#include <cstdint>
#include <vector>

#include "dprank/dataset.hpp"

namespace dprank {

/// Item popularity derived from a training split. rank is 1-based with 1 the
/// most interacted item; ties break toward the lower item id. tail_flag marks
/// the last 80% of the rank order.
struct PopularityTable {
  std::vector<std::int64_t> counts;
  std::vector<double> normalized;  // n_i / max_j n_j
  std::vector<int> rank;
  std::vector<char> tail_flag;

  int num_items() const { return static_cast<int>(counts.size()); }
};

/// Per-item weights gamma_i = (1 + p_i)^alpha used by the dynamic
/// re-weighting loss. With raw_counts the unnormalized count sum is used
/// instead of p_i (unbounded; kept for ablation).
struct GammaTable {
  double alpha = 0.0;
  std::vector<double> gamma;
};

struct PropensityTable {
  std::vector<double> theta_pos;
  std::vector<double> theta_neg;
  double exponent = 0.5;
};

struct ExposureVector {
  std::vector<double> probs;  // sums to 1
};

PopularityTable popularity(const ImplicitDataset& ds);

GammaTable gamma_table(const PopularityTable& pop, double alpha,
                       bool raw_counts = false);

PropensityTable propensities(const PopularityTable& pop,
                             double exponent = 0.5, double floor = 0.01);

// One iteration of the exposure update: O'(i) proportional to
// sum_u R[u,i] * O(i), renormalized. relevance is row-major M x N in [0,1].
ExposureVector exposure_step(const std::vector<double>& relevance,
                             int num_users, int num_items,
                             const ExposureVector& prev);

// Share of positive interactions per equal-size popularity bucket,
// items ordered from most to least popular.
std::vector<double> exposure_distribution(const ImplicitDataset& ds,
                                          int num_groups);

}  // namespace dprank
