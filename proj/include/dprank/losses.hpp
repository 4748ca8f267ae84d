#pragma once

#include <vector>

#include "dprank/exposure.hpp"
#include "dprank/model.hpp"

namespace dprank {

struct Triplet {
  int user;
  int pos;
  int neg;
};
using TripletBatch = std::vector<Triplet>;

struct PointExample {
  int user;
  int item;
  int label;  // 1 iff train positive
};
using PointBatch = std::vector<PointExample>;

struct LossOutput {
  double value = 0.0;
  SparseGrad grads;
};

// -ln sigmoid(x), overflow-safe.
double softplus_neg(double x);
double sigmoid(double x);

// False-negative suppression weight (1 - tanh(s))^beta.
double ufn_weight(double s_neg, double beta);

LossOutput bpr_loss(const TripletBatch& batch, const MFParams& params,
                    const Hyperparams& hp);

LossOutput dpr_loss(const TripletBatch& batch, const MFParams& params,
                    const GammaTable& gamma, const Hyperparams& hp,
                    bool use_ufn);

LossOutput ubpr_loss(const TripletBatch& batch, const MFParams& params,
                     const PropensityTable& theta, const Hyperparams& hp);

LossOutput relmf_loss(const PointBatch& batch, const MFParams& params,
                      const PropensityTable& theta, const Hyperparams& hp);

LossOutput mfdu_loss(const PointBatch& batch, const MFParams& params,
                     const PropensityTable& theta, const Hyperparams& hp);

}  // namespace dprank
