#include "dprank/losses.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "dprank/rng.hpp"

using namespace dprank;

namespace {

// ---- independent oracles: plain-math reimplementations, value only ----

double naive_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double naive_dot(const MFParams& p, int u, int i) {
  double s = 0.0;
  for (int k = 0; k < p.dim; ++k)
    s += p.user_factors[u * p.dim + k] * p.item_factors[i * p.dim + k];
  return s;
}

double naive_reg(const MFParams& p, double l2, int u, int i, int j) {
  double sq = 0.0;
  for (int k = 0; k < p.dim; ++k) {
    sq += p.user_factors[u * p.dim + k] * p.user_factors[u * p.dim + k];
    sq += p.item_factors[i * p.dim + k] * p.item_factors[i * p.dim + k];
    if (j >= 0)
      sq += p.item_factors[j * p.dim + k] * p.item_factors[j * p.dim + k];
  }
  return l2 * sq;
}

double naive_bpr(const TripletBatch& b, const MFParams& p, double l2) {
  double total = 0.0;
  for (const auto& t : b) {
    const double x = naive_dot(p, t.user, t.pos) - naive_dot(p, t.user, t.neg);
    total += -std::log(naive_sigmoid(x)) + naive_reg(p, l2, t.user, t.pos, t.neg);
  }
  return total / b.size();
}

double naive_dpr(const TripletBatch& b, const MFParams& p,
                 const GammaTable& g, double l2, bool ufn, double beta) {
  double total = 0.0;
  for (const auto& t : b) {
    const double si = naive_dot(p, t.user, t.pos);
    const double sj = naive_dot(p, t.user, t.neg);
    double w = 1.0;
    if (ufn) w = std::pow(1.0 - std::tanh(sj), beta);
    const double x = si / g.gamma[t.pos] - w * sj / g.gamma[t.neg];
    total += -std::log(naive_sigmoid(x)) + naive_reg(p, l2, t.user, t.pos, t.neg);
  }
  return total / b.size();
}

double naive_ubpr(const TripletBatch& b, const MFParams& p,
                  const PropensityTable& th, double l2) {
  double total = 0.0;
  for (const auto& t : b) {
    const double x = naive_dot(p, t.user, t.pos) - naive_dot(p, t.user, t.neg);
    total += -std::log(naive_sigmoid(x)) / th.theta_pos[t.pos] +
             naive_reg(p, l2, t.user, t.pos, t.neg);
  }
  return total / b.size();
}

double naive_pointwise(const PointBatch& b, const MFParams& p,
                       const PropensityTable& th, double l2, bool dual) {
  double total = 0.0;
  for (const auto& ex : b) {
    const double s = naive_dot(p, ex.user, ex.item);
    const double y = ex.label;
    const double tp = th.theta_pos[ex.item];
    double wn = 1.0 - y / tp;
    if (dual) wn /= th.theta_neg[ex.item];
    total += -(y / tp) * std::log(naive_sigmoid(s)) -
             wn * std::log(1.0 - naive_sigmoid(s)) +
             naive_reg(p, l2, ex.user, ex.item, -1);
  }
  return total / b.size();
}

// ---- fixtures ----

struct Fixture {
  MFParams params;
  Hyperparams hp;
  TripletBatch triplets;
  PointBatch points;
  GammaTable gamma;
  PropensityTable theta;
};

Fixture make_fixture(std::uint64_t seed, int dim = 4, double scale = 0.6) {
  Fixture f;
  f.hp.dim = dim;
  f.hp.seed = seed;
  f.hp.l2 = 0.01;  // large enough to exercise the reg gradient
  const int m = 6, n = 8;
  f.params = init_params(m, n, f.hp);
  auto rng = make_rng(seed, 1);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& x : f.params.user_factors) x = normal(rng);
  for (double& x : f.params.item_factors) x = normal(rng);

  std::uniform_int_distribution<int> user(0, m - 1), item(0, n - 1);
  for (int t = 0; t < 5; ++t) {
    int i = item(rng), j = item(rng);
    if (i == j) j = (j + 1) % n;
    f.triplets.push_back({user(rng), i, j});
    f.points.push_back({user(rng), item(rng), t % 2});
  }

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int u = 0; u <= i % 4; ++u) pairs.emplace_back(u, i);
  auto pop = popularity(ImplicitDataset::from_pairs(m, n, pairs));
  f.gamma = gamma_table(pop, 2.0);
  f.theta = propensities(pop, 0.5, 0.05);
  return f;
}

// central finite differences over every parameter (touched or not)
void fd_check(const std::function<LossOutput(const MFParams&)>& loss,
              const MFParams& params, double tol = 1e-5) {
  const auto out = loss(params);
  const double h = 1e-5;
  auto check_block = [&](bool users) {
    MFParams work = params;
    auto& vec = users ? work.user_factors : work.item_factors;
    const auto& grads = users ? out.grads.user : out.grads.item;
    for (std::size_t idx = 0; idx < vec.size(); ++idx) {
      const double keep = vec[idx];
      vec[idx] = keep + h;
      const double up = loss(work).value;
      vec[idx] = keep - h;
      const double down = loss(work).value;
      vec[idx] = keep;
      const double numeric = (up - down) / (2.0 * h);

      const int row = static_cast<int>(idx) / params.dim;
      const int col = static_cast<int>(idx) % params.dim;
      double analytic = 0.0;
      if (auto it = grads.find(row); it != grads.end()) analytic = it->second[col];
      const double err =
          std::abs(numeric - analytic) / std::max(1.0, std::abs(analytic));
      CHECK(err < tol);
    }
  };
  check_block(true);
  check_block(false);
}

}  // namespace

TEST_CASE("bpr at equal scores gives -ln(0.5) per triple") {
  auto f = make_fixture(1);
  std::fill(f.params.user_factors.begin(), f.params.user_factors.end(), 0.0);
  std::fill(f.params.item_factors.begin(), f.params.item_factors.end(), 0.0);
  f.hp.l2 = 0.0;
  auto out = bpr_loss(f.triplets, f.params, f.hp);
  CHECK(out.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bpr term vanishes as the margin saturates") {
  auto f = make_fixture(2);
  f.hp.l2 = 0.0;
  TripletBatch one{{0, 0, 1}};
  std::fill(f.params.user_factors.begin(), f.params.user_factors.end(), 0.0);
  std::fill(f.params.item_factors.begin(), f.params.item_factors.end(), 0.0);
  f.params.user_row(0)[0] = 1.0;
  f.params.item_row(0)[0] = 40.0;
  f.params.item_row(1)[0] = -40.0;
  auto out = bpr_loss(one, f.params, f.hp);
  CHECK(out.value < 1e-12);
  CHECK(std::isfinite(out.value));
}

TEST_CASE("bpr matches the naive oracle") {
  for (std::uint64_t seed : {3, 4, 5}) {
    auto f = make_fixture(seed);
    auto out = bpr_loss(f.triplets, f.params, f.hp);
    CHECK(out.value ==
          doctest::Approx(naive_bpr(f.triplets, f.params, f.hp.l2))
              .epsilon(1e-12));
  }
}

TEST_CASE("ufn_weight boundary values and monotonicity") {
  CHECK(ufn_weight(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(ufn_weight(123.0, 0.0) == doctest::Approx(1.0));
  CHECK(ufn_weight(40.0, 1.0) < 1e-12);
  // non-increasing in s for beta > 0
  double prev = ufn_weight(-3.0, 1.5);
  for (double s = -2.5; s <= 3.0; s += 0.5) {
    double w = ufn_weight(s, 1.5);
    CHECK(w <= prev + 1e-15);
    prev = w;
  }
  // non-increasing in beta for s > 0
  prev = ufn_weight(0.7, 0.0);
  for (double b = 0.5; b <= 4.0; b += 0.5) {
    double w = ufn_weight(0.7, b);
    CHECK(w <= prev + 1e-15);
    prev = w;
  }
}

TEST_CASE("dpr with alpha=0 equals bpr exactly") {
  auto f = make_fixture(6);
  auto pop = popularity(ImplicitDataset::from_pairs(6, 8, {{0, 0}}));
  auto g0 = gamma_table(pop, 0.0);
  auto bpr = bpr_loss(f.triplets, f.params, f.hp);
  auto dpr = dpr_loss(f.triplets, f.params, g0, f.hp, false);
  CHECK(std::abs(bpr.value - dpr.value) < 1e-12);
  for (const auto& [u, grad] : bpr.grads.user) {
    const auto& other = dpr.grads.user.at(u);
    for (int k = 0; k < f.params.dim; ++k)
      CHECK(std::abs(grad[k] - other[k]) < 1e-12);
  }
  for (const auto& [i, grad] : bpr.grads.item) {
    const auto& other = dpr.grads.item.at(i);
    for (int k = 0; k < f.params.dim; ++k)
      CHECK(std::abs(grad[k] - other[k]) < 1e-12);
  }
}

TEST_CASE("dpr with ufn at zero scores gives ln 2 per triple") {
  auto f = make_fixture(7);
  std::fill(f.params.user_factors.begin(), f.params.user_factors.end(), 0.0);
  std::fill(f.params.item_factors.begin(), f.params.item_factors.end(), 0.0);
  f.hp.l2 = 0.0;
  auto out = dpr_loss(f.triplets, f.params, f.gamma, f.hp, true);
  CHECK(out.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("dpr matches the naive oracle, both variants") {
  for (std::uint64_t seed : {8, 9}) {
    auto f = make_fixture(seed);
    auto plain = dpr_loss(f.triplets, f.params, f.gamma, f.hp, false);
    CHECK(plain.value ==
          doctest::Approx(
              naive_dpr(f.triplets, f.params, f.gamma, f.hp.l2, false, 0))
              .epsilon(1e-12));
    auto with_ufn = dpr_loss(f.triplets, f.params, f.gamma, f.hp, true);
    CHECK(with_ufn.value ==
          doctest::Approx(naive_dpr(f.triplets, f.params, f.gamma, f.hp.l2,
                                    true, f.hp.beta))
              .epsilon(1e-12));
  }
}

TEST_CASE("dpr rejects a gamma table of the wrong size") {
  auto f = make_fixture(10);
  GammaTable bad;
  bad.gamma = {1.0, 1.0};
  CHECK_THROWS(dpr_loss(f.triplets, f.params, bad, f.hp, false));
}

TEST_CASE("ubpr collapses to bpr at unit propensity, doubles at 0.5") {
  auto f = make_fixture(11);
  PropensityTable unit;
  unit.theta_pos.assign(8, 1.0);
  unit.theta_neg.assign(8, 1.0);
  auto a = ubpr_loss(f.triplets, f.params, unit, f.hp);
  auto b = bpr_loss(f.triplets, f.params, f.hp);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));

  f.hp.l2 = 0.0;
  PropensityTable half = unit;
  half.theta_pos.assign(8, 0.5);
  auto c = ubpr_loss(f.triplets, f.params, half, f.hp);
  auto d = bpr_loss(f.triplets, f.params, f.hp);
  CHECK(c.value == doctest::Approx(2.0 * d.value).epsilon(1e-12));
}

TEST_CASE("ubpr matches the naive oracle") {
  auto f = make_fixture(12);
  auto out = ubpr_loss(f.triplets, f.params, f.theta, f.hp);
  CHECK(out.value ==
        doctest::Approx(naive_ubpr(f.triplets, f.params, f.theta, f.hp.l2))
            .epsilon(1e-12));
}

TEST_CASE("relmf reduces to cross-entropy at unit propensity") {
  auto f = make_fixture(13);
  f.hp.l2 = 0.0;
  PropensityTable unit;
  unit.theta_pos.assign(8, 1.0);
  unit.theta_neg.assign(8, 1.0);
  std::fill(f.params.user_factors.begin(), f.params.user_factors.end(), 0.0);
  auto out = relmf_loss({{0, 0, 0}}, f.params, unit, f.hp);
  CHECK(out.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("relmf and mfdu match the naive oracle") {
  for (std::uint64_t seed : {14, 15}) {
    auto f = make_fixture(seed);
    auto rel = relmf_loss(f.points, f.params, f.theta, f.hp);
    CHECK(rel.value ==
          doctest::Approx(
              naive_pointwise(f.points, f.params, f.theta, f.hp.l2, false))
              .epsilon(1e-12));
    auto du = mfdu_loss(f.points, f.params, f.theta, f.hp);
    CHECK(du.value ==
          doctest::Approx(
              naive_pointwise(f.points, f.params, f.theta, f.hp.l2, true))
              .epsilon(1e-12));
  }
}

TEST_CASE("mfdu doubles the negative term at theta_neg = 0.5") {
  auto f = make_fixture(16);
  f.hp.l2 = 0.0;
  PropensityTable th;
  th.theta_pos.assign(8, 1.0);
  th.theta_neg.assign(8, 0.5);
  std::fill(f.params.user_factors.begin(), f.params.user_factors.end(), 0.0);
  auto out = mfdu_loss({{0, 0, 0}}, f.params, th, f.hp);
  CHECK(out.value == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("analytic gradients match finite differences") {
  auto f = make_fixture(17);
  fd_check([&](const MFParams& p) { return bpr_loss(f.triplets, p, f.hp); },
           f.params);
  fd_check(
      [&](const MFParams& p) {
        return dpr_loss(f.triplets, p, f.gamma, f.hp, false);
      },
      f.params);
  for (double beta : {0.5, 1.0, 2.0}) {
    f.hp.beta = beta;
    fd_check(
        [&](const MFParams& p) {
          return dpr_loss(f.triplets, p, f.gamma, f.hp, true);
        },
        f.params);
  }
  fd_check(
      [&](const MFParams& p) {
        return ubpr_loss(f.triplets, p, f.theta, f.hp);
      },
      f.params);
  fd_check(
      [&](const MFParams& p) {
        return relmf_loss(f.points, p, f.theta, f.hp);
      },
      f.params);
  fd_check(
      [&](const MFParams& p) {
        return mfdu_loss(f.points, p, f.theta, f.hp);
      },
      f.params);
}

TEST_CASE("losses are permutation invariant and mean reduced") {
  auto f = make_fixture(18);
  auto forward = bpr_loss(f.triplets, f.params, f.hp);
  auto reversed_batch = f.triplets;
  std::reverse(reversed_batch.begin(), reversed_batch.end());
  auto reversed = bpr_loss(reversed_batch, f.params, f.hp);
  CHECK(forward.value == doctest::Approx(reversed.value).epsilon(1e-12));

  // duplicating the batch leaves the mean unchanged
  auto doubled_batch = f.triplets;
  doubled_batch.insert(doubled_batch.end(), f.triplets.begin(),
                       f.triplets.end());
  auto doubled = bpr_loss(doubled_batch, f.params, f.hp);
  CHECK(forward.value == doctest::Approx(doubled.value).epsilon(1e-12));
}

TEST_CASE("empty batches are rejected") {
  auto f = make_fixture(19);
  CHECK_THROWS(bpr_loss({}, f.params, f.hp));
  CHECK_THROWS(relmf_loss({}, f.params, f.theta, f.hp));
}
