#include "dprank/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dprank/rng.hpp"

namespace dprank {

namespace {

// Unobserved candidate pool for one user under score_sorted: the user's
// top-scoring unobserved items (hard negatives).
std::vector<int> top_unobserved_pool(const ImplicitDataset& train,
                                     const MFParams& params, int user,
                                     int pool_size) {
  std::vector<double> scores;
  params.score_all(user, scores);
  std::vector<int> candidates;
  candidates.reserve(train.num_items());
  for (int i = 0; i < train.num_items(); ++i) {
    if (!train.has(user, i)) candidates.push_back(i);
  }
  const auto keep = std::min<std::size_t>(pool_size, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  candidates.resize(keep);
  return candidates;
}

}  // namespace

TripletBatch build_triplets(const ImplicitDataset& train,
                            const SamplerConfig& cfg, int epoch,
                            const MFParams* params, SamplerStats* stats) {
  if (train.num_positives() == 0)
    throw std::invalid_argument("build_triplets: empty train set");
  if (cfg.num_negatives < 1)
    throw std::invalid_argument("build_triplets: num_negatives < 1");
  if (cfg.strategy == NegStrategy::score_sorted && params == nullptr)
    throw std::invalid_argument("build_triplets: score_sorted needs params");

  const int n = train.num_items();
  const std::uint64_t epoch_eff = cfg.resample_each_epoch ? epoch : 0;
  TripletBatch batch;
  batch.reserve(train.num_positives() * cfg.num_negatives);

  for (int u = 0; u < train.num_users(); ++u) {
    const auto& items = train.items_of(u);
    if (items.empty()) continue;
    const int unobserved = n - static_cast<int>(items.size());
    if (unobserved == 0) {
      if (stats) ++stats->users_skipped;
      continue;
    }
    if (stats && unobserved < cfg.num_negatives)
      ++stats->users_with_replacement;

    auto rng = make_rng(cfg.seed, epoch_eff, static_cast<std::uint64_t>(u));
    std::vector<int> pool;
    if (cfg.strategy == NegStrategy::score_sorted)
      pool = top_unobserved_pool(train, *params, u, cfg.pool_size);

    for (int i : items) {
      for (int k = 0; k < cfg.num_negatives; ++k) {
        int j;
        if (cfg.strategy == NegStrategy::score_sorted) {
          j = pool[std::uniform_int_distribution<std::size_t>(
              0, pool.size() - 1)(rng)];
        } else {
          std::uniform_int_distribution<int> pick(0, n - 1);
          do {
            j = pick(rng);
          } while (train.has(u, j));
        }
        batch.push_back({u, i, j});
      }
    }
  }
  return batch;
}

PointBatch build_points(const ImplicitDataset& train, const SamplerConfig& cfg,
                        int epoch, SamplerStats* stats) {
  if (train.num_positives() == 0)
    throw std::invalid_argument("build_points: empty train set");
  const int n = train.num_items();
  const std::uint64_t epoch_eff = cfg.resample_each_epoch ? epoch : 0;
  PointBatch batch;
  batch.reserve(train.num_positives() * (1 + cfg.num_negatives));

  for (int u = 0; u < train.num_users(); ++u) {
    const auto& items = train.items_of(u);
    if (items.empty()) continue;
    const int unobserved = n - static_cast<int>(items.size());
    auto rng = make_rng(cfg.seed, epoch_eff, static_cast<std::uint64_t>(u));
    for (int i : items) {
      batch.push_back({u, i, 1});
      if (unobserved == 0) {
        if (stats) ++stats->users_skipped;
        continue;
      }
      for (int k = 0; k < cfg.num_negatives; ++k) {
        std::uniform_int_distribution<int> pick(0, n - 1);
        int j;
        do {
          j = pick(rng);
        } while (train.has(u, j));
        batch.push_back({u, j, 0});
      }
    }
    if (stats && unobserved > 0 && unobserved < cfg.num_negatives)
      ++stats->users_with_replacement;
  }
  return batch;
}

}  // namespace dprank
