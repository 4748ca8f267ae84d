#include "dprank/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace dprank {

double softplus_neg(double x) {
  // -ln sigmoid(x) = softplus(-x)
  if (x > 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double ufn_weight(double s_neg, double beta) {
  if (beta < 0.0) throw std::invalid_argument("ufn_weight: beta < 0");
  if (beta == 0.0) return 1.0;
  return std::pow(1.0 - std::tanh(s_neg), beta);
}

namespace {

// Accumulates the shared L2 term lambda*(sum of touched row norms) and its
// gradient for one example, scaled by inv_batch.
void add_l2_rows(LossOutput& out, const MFParams& params, double l2,
                 double inv_batch, int u, int i, int j) {
  const int d = params.dim;
  const double coef = 2.0 * l2 * inv_batch;
  double sq = 0.0;
  auto pu = params.user_row(u);
  auto& gu = out.grads.user_acc(u, d);
  for (int k = 0; k < d; ++k) {
    sq += pu[k] * pu[k];
    gu[k] += coef * pu[k];
  }
  auto vi = params.item_row(i);
  auto& gi = out.grads.item_acc(i, d);
  for (int k = 0; k < d; ++k) {
    sq += vi[k] * vi[k];
    gi[k] += coef * vi[k];
  }
  if (j >= 0) {
    auto vj = params.item_row(j);
    auto& gj = out.grads.item_acc(j, d);
    for (int k = 0; k < d; ++k) {
      sq += vj[k] * vj[k];
      gj[k] += coef * vj[k];
    }
  }
  out.value += l2 * sq * inv_batch;
}

// Generic weighted pairwise term: value += weight * softplus_neg(x) where
// x = ci*s_i + cj*s_j; ci, cj are the (constant) score coefficients.
void add_pairwise(LossOutput& out, const MFParams& params, const Triplet& t,
                  double ci, double cj, double weight, double x,
                  double inv_batch) {
  const int d = params.dim;
  out.value += weight * softplus_neg(x) * inv_batch;
  const double dx = -weight * sigmoid(-x) * inv_batch;
  const double a = dx * ci;
  const double b = dx * cj;
  auto pu = params.user_row(t.user);
  auto vi = params.item_row(t.pos);
  auto vj = params.item_row(t.neg);
  auto& gu = out.grads.user_acc(t.user, d);
  auto& gi = out.grads.item_acc(t.pos, d);
  auto& gj = out.grads.item_acc(t.neg, d);
  for (int k = 0; k < d; ++k) {
    gu[k] += a * vi[k] + b * vj[k];
    gi[k] += a * pu[k];
    gj[k] += b * pu[k];
  }
}

void check_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("loss: empty batch");
}

}  // namespace

LossOutput bpr_loss(const TripletBatch& batch, const MFParams& params,
                    const Hyperparams& hp) {
  check_nonempty(batch.size());
  LossOutput out;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& t : batch) {
    const double x = params.score(t.user, t.pos) - params.score(t.user, t.neg);
    add_pairwise(out, params, t, 1.0, -1.0, 1.0, x, inv);
    add_l2_rows(out, params, hp.l2, inv, t.user, t.pos, t.neg);
  }
  return out;
}

LossOutput dpr_loss(const TripletBatch& batch, const MFParams& params,
                    const GammaTable& gamma, const Hyperparams& hp,
                    bool use_ufn) {
  check_nonempty(batch.size());
  if (static_cast<int>(gamma.gamma.size()) != params.num_items)
    throw std::invalid_argument("dpr_loss: gamma dimension mismatch");
  LossOutput out;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& t : batch) {
    const double gi = gamma.gamma[t.pos];
    const double gj = gamma.gamma[t.neg];
    const double si = params.score(t.user, t.pos);
    const double sj = params.score(t.user, t.neg);
    double w = 1.0;
    double dw = 0.0;  // dw/ds_j
    if (use_ufn && hp.beta > 0.0) {
      const double th = std::tanh(sj);
      w = std::pow(1.0 - th, hp.beta);
      // d/ds (1-tanh s)^b = -b (1-tanh s)^(b-1) (1-tanh^2 s)
      //                   = -b (1-tanh s)^b (1+tanh s)
      dw = -hp.beta * w * (1.0 + th);
    }
    const double x = si / gi - w * sj / gj;
    // x depends on s_j through both w and the score itself.
    const double cj = -(w + dw * sj) / gj;
    add_pairwise(out, params, t, 1.0 / gi, cj, 1.0, x, inv);
    add_l2_rows(out, params, hp.l2, inv, t.user, t.pos, t.neg);
  }
  return out;
}

LossOutput ubpr_loss(const TripletBatch& batch, const MFParams& params,
                     const PropensityTable& theta, const Hyperparams& hp) {
  check_nonempty(batch.size());
  if (static_cast<int>(theta.theta_pos.size()) != params.num_items)
    throw std::invalid_argument("ubpr_loss: propensity dimension mismatch");
  LossOutput out;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& t : batch) {
    // Sampled negatives are unobserved, so the weight reduces to 1/theta+_i.
    const double w = 1.0 / theta.theta_pos[t.pos];
    const double x = params.score(t.user, t.pos) - params.score(t.user, t.neg);
    add_pairwise(out, params, t, 1.0, -1.0, w, x, inv);
    add_l2_rows(out, params, hp.l2, inv, t.user, t.pos, t.neg);
  }
  return out;
}

namespace {

// Pointwise cross-entropy with separate positive/negative weights:
// value += wp*softplus(-s) + wn*softplus(s).
LossOutput pointwise_loss(const PointBatch& batch, const MFParams& params,
                          const PropensityTable& theta, const Hyperparams& hp,
                          bool divide_neg_by_theta_neg) {
  check_nonempty(batch.size());
  if (static_cast<int>(theta.theta_pos.size()) != params.num_items)
    throw std::invalid_argument("pointwise loss: propensity dimension mismatch");
  LossOutput out;
  const int d = params.dim;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const double tp = theta.theta_pos[ex.item];
    const double y = static_cast<double>(ex.label);
    double wp = y / tp;
    double wn = 1.0 - y / tp;
    if (divide_neg_by_theta_neg) wn /= theta.theta_neg[ex.item];
    const double s = params.score(ex.user, ex.item);
    out.value += (wp * softplus_neg(s) + wn * softplus_neg(-s)) * inv;
    const double ds = (-wp * sigmoid(-s) + wn * sigmoid(s)) * inv;
    auto pu = params.user_row(ex.user);
    auto vi = params.item_row(ex.item);
    auto& gu = out.grads.user_acc(ex.user, d);
    auto& gi = out.grads.item_acc(ex.item, d);
    for (int k = 0; k < d; ++k) {
      gu[k] += ds * vi[k];
      gi[k] += ds * pu[k];
    }
    add_l2_rows(out, params, hp.l2, inv, ex.user, ex.item, -1);
  }
  return out;
}

}  // namespace

LossOutput relmf_loss(const PointBatch& batch, const MFParams& params,
                      const PropensityTable& theta, const Hyperparams& hp) {
  return pointwise_loss(batch, params, theta, hp, false);
}

LossOutput mfdu_loss(const PointBatch& batch, const MFParams& params,
                     const PropensityTable& theta, const Hyperparams& hp) {
  return pointwise_loss(batch, params, theta, hp, true);
}

}  // namespace dprank
