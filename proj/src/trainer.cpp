#include "dprank/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dprank/rng.hpp"

namespace dprank {

LossContext LossContext::build(const ImplicitDataset& train,
                               const Hyperparams& hp) {
  LossContext ctx;
  ctx.pop = popularity(train);
  ctx.gamma = gamma_table(ctx.pop, hp.alpha);
  ctx.theta = propensities(ctx.pop);
  return ctx;
}

LossOutput compute_loss(LossKind kind, const TripletBatch& triplets,
                        const PointBatch& points, const MFParams& params,
                        const LossContext& ctx, const Hyperparams& hp) {
  switch (kind) {
    case LossKind::bpr:
      return bpr_loss(triplets, params, hp);
    case LossKind::dpr:
      return dpr_loss(triplets, params, ctx.gamma, hp, true);
    case LossKind::dpr_minus:
      return dpr_loss(triplets, params, ctx.gamma, hp, false);
    case LossKind::ubpr:
      return ubpr_loss(triplets, params, ctx.theta, hp);
    case LossKind::relmf:
      return relmf_loss(points, params, ctx.theta, hp);
    case LossKind::mfdu:
      return mfdu_loss(points, params, ctx.theta, hp);
  }
  throw std::logic_error("compute_loss: unhandled kind");
}

namespace {

// One epoch of mini-batch updates; returns mean batch loss.
double run_epoch(const ImplicitDataset& train, MFParams& params,
                 AdamState& adam, const LossContext& ctx,
                 const Hyperparams& hp, const SamplerConfig& sampler,
                 int epoch) {
  const bool pairwise = is_pairwise(hp.loss);
  TripletBatch triplets;
  PointBatch points;
  std::size_t total;
  if (pairwise) {
    triplets = build_triplets(train, sampler, epoch,
                              sampler.strategy == NegStrategy::score_sorted
                                  ? &params
                                  : nullptr);
    total = triplets.size();
  } else {
    points = build_points(train, sampler, epoch);
    total = points.size();
  }

  std::vector<std::size_t> order(total);
  for (std::size_t k = 0; k < total; ++k) order[k] = k;
  auto rng = make_rng(hp.seed, 0x736866ULL, static_cast<std::uint64_t>(epoch));
  std::shuffle(order.begin(), order.end(), rng);

  double loss_sum = 0.0;
  int batches = 0;
  const std::size_t bs = static_cast<std::size_t>(hp.batch_size);
  TripletBatch tbatch;
  PointBatch pbatch;
  for (std::size_t start = 0; start < total; start += bs) {
    const std::size_t end = std::min(start + bs, total);
    LossOutput out;
    if (pairwise) {
      tbatch.clear();
      for (std::size_t k = start; k < end; ++k)
        tbatch.push_back(triplets[order[k]]);
      out = compute_loss(hp.loss, tbatch, {}, params, ctx, hp);
    } else {
      pbatch.clear();
      for (std::size_t k = start; k < end; ++k)
        pbatch.push_back(points[order[k]]);
      out = compute_loss(hp.loss, {}, pbatch, params, ctx, hp);
    }
    if (!std::isfinite(out.value))
      throw std::runtime_error("training loss became non-finite");
    adam_step(params, out.grads, adam, hp);
    loss_sum += out.value;
    ++batches;
  }
  return batches == 0 ? 0.0 : loss_sum / batches;
}

}  // namespace

MFParams fit(const ImplicitDataset& train, const Hyperparams& hp,
             const SamplerConfig& sampler) {
  hp.validate();
  auto ctx = LossContext::build(train, hp);
  auto params = init_params(train.num_users(), train.num_items(), hp);
  auto adam = AdamState::for_params(params);
  for (int epoch = 0; epoch < hp.epochs; ++epoch)
    run_epoch(train, params, adam, ctx, hp, sampler, epoch);
  if (!params.all_finite())
    throw std::runtime_error("fit: parameters diverged");
  return params;
}

TrainResult train_with_early_stopping(const SplitDataset& split,
                                      const Hyperparams& hp,
                                      const SamplerConfig& sampler,
                                      int patience, int eval_k) {
  hp.validate();
  auto ctx = LossContext::build(split.train, hp);
  auto params = init_params(split.train.num_users(), split.train.num_items(), hp);
  auto adam = AdamState::for_params(params);

  EvalConfig ecfg;
  ecfg.k = eval_k;
  ecfg.protocol = EvalProtocol::full_rank;

  TrainResult result;
  result.params = params;
  int since_best = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss =
        run_epoch(split.train, params, adam, ctx, hp, sampler, epoch);
    const auto report =
        evaluate(params, split, ecfg, ctx.pop, HeldOutKind::validation);
    rec.val_recall = report.recall;
    rec.val_ndcg = report.ndcg;
    result.history.push_back(rec);

    if (report.ndcg > result.best_val_ndcg || result.best_epoch < 0) {
      result.best_val_ndcg = report.ndcg;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= patience) {
      break;
    }
  }
  return result;
}

}  // namespace dprank
