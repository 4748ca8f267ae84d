#pragma once

#include <vector>

#include "dprank/dataset.hpp"
#include "dprank/eval.hpp"
#include "dprank/exposure.hpp"
#include "dprank/losses.hpp"
#include "dprank/model.hpp"
#include "dprank/sampler.hpp"

namespace dprank {

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_recall = 0.0;
  double val_ndcg = 0.0;
};

struct TrainResult {
  MFParams params;  // best validation epoch (or final, without validation)
  int best_epoch = -1;
  double best_val_ndcg = 0.0;
  std::vector<EpochRecord> history;
};

/// Precomputed per-item tables the losses need; built once from train.
struct LossContext {
  PopularityTable pop;
  GammaTable gamma;
  PropensityTable theta;

  static LossContext build(const ImplicitDataset& train,
                           const Hyperparams& hp);
};

LossOutput compute_loss(LossKind kind, const TripletBatch& triplets,
                        const PointBatch& points, const MFParams& params,
                        const LossContext& ctx, const Hyperparams& hp);

/// Fixed-epoch training without validation; used by the loop simulator.
MFParams fit(const ImplicitDataset& train, const Hyperparams& hp,
             const SamplerConfig& sampler);

/// Full training loop with per-epoch validation NDCG@5 early stopping.
TrainResult train_with_early_stopping(const SplitDataset& split,
                                      const Hyperparams& hp,
                                      const SamplerConfig& sampler,
                                      int patience = 10,
                                      int eval_k = 5);

}  // namespace dprank
