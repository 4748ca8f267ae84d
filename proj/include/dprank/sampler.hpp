#pragma once

#include <cstdint>

#include "dprank/dataset.hpp"
#include "dprank/losses.hpp"
#include "dprank/model.hpp"

namespace dprank {

enum class NegStrategy { uniform, score_sorted };

struct SamplerConfig {
  int num_negatives = 10;
  bool resample_each_epoch = true;
  NegStrategy strategy = NegStrategy::uniform;
  std::uint64_t seed = 0;
  int pool_size = 100;  // candidate pool for score_sorted
};

struct SamplerStats {
  int users_with_replacement = 0;  // unobserved set smaller than requested
  int users_skipped = 0;           // no unobserved items at all
};

/// One epoch worth of triplets: num_negatives per train positive, negatives
/// never train positives. Deterministic given (seed, epoch).
TripletBatch build_triplets(const ImplicitDataset& train,
                            const SamplerConfig& cfg, int epoch,
                            const MFParams* params = nullptr,
                            SamplerStats* stats = nullptr);

/// Pointwise stream: every positive labeled 1 plus num_negatives sampled
/// unobserved pairs per positive labeled 0.
PointBatch build_points(const ImplicitDataset& train, const SamplerConfig& cfg,
                        int epoch, SamplerStats* stats = nullptr);

}  // namespace dprank
