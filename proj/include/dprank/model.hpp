#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dprank {

enum class LossKind { bpr, dpr, dpr_minus, ubpr, relmf, mfdu };

LossKind loss_kind_from_string(const std::string& name);
std::string to_string(LossKind kind);
bool is_pairwise(LossKind kind);

struct Hyperparams {
  int dim = 64;
  double lr = 1e-3;
  double l2 = 1e-6;
  int batch_size = 256;
  int num_negatives = 10;
  double alpha = 2.0;  // exposure weight, in [0,6]
  double beta = 1.0;   // false-negative suppression strength
  int epochs = 200;
  std::uint64_t seed = 42;
  LossKind loss = LossKind::dpr;

  void validate() const;
};

/// Matrix-factorization embeddings, row-major M x d and N x d.
struct MFParams {
  int num_users = 0;
  int num_items = 0;
  int dim = 0;
  std::vector<double> user_factors;
  std::vector<double> item_factors;

  std::span<double> user_row(int u) {
    return {user_factors.data() + static_cast<std::size_t>(u) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> user_row(int u) const {
    return {user_factors.data() + static_cast<std::size_t>(u) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> item_row(int i) {
    return {item_factors.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> item_row(int i) const {
    return {item_factors.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }

  double score(int u, int i) const;
  void score_all(int u, std::vector<double>& out) const;
  bool all_finite() const;
};

MFParams init_params(int num_users, int num_items, const Hyperparams& hp);

/// Sparse gradient: per-row accumulators keyed by user/item index.
struct SparseGrad {
  std::unordered_map<int, std::vector<double>> user;
  std::unordered_map<int, std::vector<double>> item;

  std::vector<double>& user_acc(int u, int dim);
  std::vector<double>& item_acc(int i, int dim);
};

/// Adam moments. Rows untouched by a batch keep stale moments (lazy
/// sparse variant); bias correction uses the global step counter.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<double> m_user, v_user, m_item, v_item;

  static AdamState for_params(const MFParams& params);
};

void adam_step(MFParams& params, const SparseGrad& grads, AdamState& state,
               const Hyperparams& hp);

}  // namespace dprank
