#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dprank/dataset.hpp"
#include "dprank/model.hpp"
#include "dprank/sampler.hpp"

namespace dprank {

struct SimConfig {
  int num_users = 200;
  int num_items = 500;
  int init_items_per_user = 20;
  int init_users_per_item = 20;  // honored in expectation, not exactly
  int accept_k = 2;
  int rec_top = 10;
  int metric_k = 30;
  int loops = 50;
  int epochs_per_loop = 10;
  std::uint64_t seed = 0;
  Hyperparams hp;
  SamplerConfig sampler;

  void validate() const;
};

struct LoopRecord {
  int loop = 0;
  int new_interactions = 0;
  std::int64_t cumulative = 0;
  double tap_of_recs = 0.0;
  double arp_of_recs = 0.0;
};

struct LoopState {
  int generation = 0;
  ImplicitDataset dataset;
  std::vector<LoopRecord> per_loop;
  bool aborted = false;  // training diverged; per_loop holds the prefix
};

/// Test seam: produces a length-k recommendation list for one user.
using Recommender = std::function<std::vector<int>(
    int user, const MFParams& params, const ImplicitDataset& current, int k)>;

ImplicitDataset gen_initial(const SimConfig& cfg);

LoopState run_simulation(const SimConfig& cfg,
                         const Recommender& recommender = nullptr);

struct MethodCurve {
  LossKind loss;
  std::uint64_t seed;
  std::vector<LoopRecord> records;
};

std::vector<MethodCurve> compare_methods(
    const std::vector<SimConfig>& cfgs, const std::vector<std::uint64_t>& seeds);

}  // namespace dprank
