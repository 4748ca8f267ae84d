#include "dprank/model.hpp"

#include <cmath>
#include <stdexcept>

#include "dprank/rng.hpp"

namespace dprank {

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "bpr") return LossKind::bpr;
  if (name == "dpr") return LossKind::dpr;
  if (name == "dpr-" || name == "dpr_minus") return LossKind::dpr_minus;
  if (name == "ubpr") return LossKind::ubpr;
  if (name == "relmf") return LossKind::relmf;
  if (name == "mfdu") return LossKind::mfdu;
  throw std::invalid_argument("unknown loss: " + name);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::bpr: return "bpr";
    case LossKind::dpr: return "dpr";
    case LossKind::dpr_minus: return "dpr_minus";
    case LossKind::ubpr: return "ubpr";
    case LossKind::relmf: return "relmf";
    case LossKind::mfdu: return "mfdu";
  }
  return "?";
}

bool is_pairwise(LossKind kind) {
  return kind == LossKind::bpr || kind == LossKind::dpr ||
         kind == LossKind::dpr_minus || kind == LossKind::ubpr;
}

void Hyperparams::validate() const {
  if (dim <= 0) throw std::invalid_argument("dim must be positive");
  if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
  if (l2 < 0.0) throw std::invalid_argument("l2 must be non-negative");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (num_negatives < 1) throw std::invalid_argument("num_negatives must be >= 1");
  if (alpha < 0.0 || alpha > 6.0)
    throw std::invalid_argument("alpha must lie in [0,6]");
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
}

double MFParams::score(int u, int i) const {
  if (u < 0 || u >= num_users || i < 0 || i >= num_items)
    throw std::out_of_range("score: index out of range");
  const auto pu = user_row(u);
  const auto vi = item_row(i);
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += pu[k] * vi[k];
  return s;
}

void MFParams::score_all(int u, std::vector<double>& out) const {
  if (u < 0 || u >= num_users)
    throw std::out_of_range("score_all: user out of range");
  out.resize(num_items);
  const auto pu = user_row(u);
  for (int i = 0; i < num_items; ++i) {
    const double* vi = item_factors.data() + static_cast<std::size_t>(i) * dim;
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += pu[k] * vi[k];
    out[i] = s;
  }
}

bool MFParams::all_finite() const {
  for (double x : user_factors)
    if (!std::isfinite(x)) return false;
  for (double x : item_factors)
    if (!std::isfinite(x)) return false;
  return true;
}

MFParams init_params(int num_users, int num_items, const Hyperparams& hp) {
  if (num_users <= 0 || num_items <= 0)
    throw std::invalid_argument("init_params: empty dimensions");
  hp.validate();
  MFParams params;
  params.num_users = num_users;
  params.num_items = num_items;
  params.dim = hp.dim;
  params.user_factors.resize(static_cast<std::size_t>(num_users) * hp.dim);
  params.item_factors.resize(static_cast<std::size_t>(num_items) * hp.dim);
  auto rng = make_rng(hp.seed, 0x696e6974ULL);  // "init"
  std::normal_distribution<double> normal(0.0, 0.01);
  for (double& x : params.user_factors) x = normal(rng);
  for (double& x : params.item_factors) x = normal(rng);
  return params;
}

std::vector<double>& SparseGrad::user_acc(int u, int dim) {
  auto [it, inserted] = user.try_emplace(u);
  if (inserted) it->second.assign(dim, 0.0);
  return it->second;
}

std::vector<double>& SparseGrad::item_acc(int i, int dim) {
  auto [it, inserted] = item.try_emplace(i);
  if (inserted) it->second.assign(dim, 0.0);
  return it->second;
}

AdamState AdamState::for_params(const MFParams& params) {
  AdamState state;
  state.m_user.assign(params.user_factors.size(), 0.0);
  state.v_user.assign(params.user_factors.size(), 0.0);
  state.m_item.assign(params.item_factors.size(), 0.0);
  state.v_item.assign(params.item_factors.size(), 0.0);
  return state;
}

namespace {

void apply_row(double* p, double* m, double* v, const std::vector<double>& g,
               int dim, const AdamState& state, double lr, double bc1,
               double bc2) {
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(g[k]))
      throw std::runtime_error("adam_step: non-finite gradient");
    m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
    v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
    const double mhat = m[k] / bc1;
    const double vhat = v[k] / bc2;
    p[k] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace

void adam_step(MFParams& params, const SparseGrad& grads, AdamState& state,
               const Hyperparams& hp) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (const auto& [u, g] : grads.user) {
    const std::size_t off = static_cast<std::size_t>(u) * params.dim;
    apply_row(params.user_factors.data() + off, state.m_user.data() + off,
              state.v_user.data() + off, g, params.dim, state, hp.lr, bc1, bc2);
  }
  for (const auto& [i, g] : grads.item) {
    const std::size_t off = static_cast<std::size_t>(i) * params.dim;
    apply_row(params.item_factors.data() + off, state.m_item.data() + off,
              state.v_item.data() + off, g, params.dim, state, hp.lr, bc1, bc2);
  }
}

}  // namespace dprank
