#include "dprank/sampler.hpp"

#include <set>

#include "doctest.h"

using namespace dprank;

namespace {

ImplicitDataset grid_dataset(int users, int items, int per_user) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < users; ++u)
    for (int k = 0; k < per_user; ++k)
      pairs.emplace_back(u, (u * 7 + k * 3) % items);
  return ImplicitDataset::from_pairs(users, items, pairs);
}

}  // namespace

TEST_CASE("build_triplets emits num_negatives per positive") {
  std::vector<std::pair<int, int>> pairs{{0, 0}};
  auto train = ImplicitDataset::from_pairs(1, 20, pairs);
  SamplerConfig cfg;
  cfg.num_negatives = 10;
  auto batch = build_triplets(train, cfg, 0);
  CHECK(batch.size() == 10);
  for (const auto& t : batch) {
    CHECK(t.user == 0);
    CHECK(t.pos == 0);
    CHECK(t.neg != 0);
  }
}

TEST_CASE("build_triplets falls back to replacement when forced") {
  // all items positive except item 4
  std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {0, 2}, {0, 3}};
  auto train = ImplicitDataset::from_pairs(1, 5, pairs);
  SamplerConfig cfg;
  cfg.num_negatives = 3;
  SamplerStats stats;
  auto batch = build_triplets(train, cfg, 0, nullptr, &stats);
  CHECK(batch.size() == 4 * 3);
  for (const auto& t : batch) CHECK(t.neg == 4);
  CHECK(stats.users_with_replacement == 1);
}

TEST_CASE("build_triplets skips users with no unobserved items") {
  std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {1, 0}};
  auto train = ImplicitDataset::from_pairs(2, 2, pairs);
  SamplerConfig cfg;
  cfg.num_negatives = 2;
  SamplerStats stats;
  auto batch = build_triplets(train, cfg, 0, nullptr, &stats);
  CHECK(stats.users_skipped == 1);
  for (const auto& t : batch) CHECK(t.user == 1);
}

TEST_CASE("build_triplets deterministic per (seed, epoch)") {
  auto train = grid_dataset(30, 50, 5);
  SamplerConfig cfg;
  cfg.seed = 77;
  auto a = build_triplets(train, cfg, 3);
  auto b = build_triplets(train, cfg, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].user == b[k].user);
    CHECK(a[k].pos == b[k].pos);
    CHECK(a[k].neg == b[k].neg);
  }
}

TEST_CASE("no sampled negative is a train positive (exhaustive)") {
  auto train = grid_dataset(20, 25, 6);
  SamplerConfig cfg;
  cfg.seed = 5;
  for (int epoch = 0; epoch < 4; ++epoch) {
    for (const auto& t : build_triplets(train, cfg, epoch)) {
      CHECK(train.has(t.user, t.pos));
      CHECK_FALSE(train.has(t.user, t.neg));
    }
  }
}

TEST_CASE("consecutive epochs resample different negative sets") {
  auto train = grid_dataset(100, 200, 5);
  SamplerConfig cfg;
  cfg.seed = 11;
  auto e0 = build_triplets(train, cfg, 0);
  auto e1 = build_triplets(train, cfg, 1);
  REQUIRE(e0.size() == e1.size());
  std::size_t differing = 0;
  for (std::size_t k = 0; k < e0.size(); ++k)
    if (e0[k].neg != e1[k].neg) ++differing;
  CHECK(differing > e0.size() / 2);

  cfg.resample_each_epoch = false;
  auto f0 = build_triplets(train, cfg, 0);
  auto f1 = build_triplets(train, cfg, 1);
  for (std::size_t k = 0; k < f0.size(); ++k) CHECK(f0[k].neg == f1[k].neg);
}

TEST_CASE("score_sorted draws hard negatives from the top pool") {
  auto train = grid_dataset(4, 40, 4);
  Hyperparams hp;
  hp.dim = 8;
  hp.seed = 1;
  auto params = init_params(4, 40, hp);
  SamplerConfig cfg;
  cfg.strategy = NegStrategy::score_sorted;
  cfg.pool_size = 5;
  CHECK_THROWS(build_triplets(train, cfg, 0));  // params required

  auto batch = build_triplets(train, cfg, 0, &params);
  // every sampled negative must sit inside the user's top-5 unobserved pool
  std::vector<double> scores;
  for (const auto& t : batch) {
    params.score_all(t.user, scores);
    int better = 0;
    for (int i = 0; i < 40; ++i) {
      if (train.has(t.user, i)) continue;
      if (scores[i] > scores[t.neg]) ++better;
    }
    CHECK(better < 5);
  }
}

TEST_CASE("build_points labels positives 1 and sampled negatives 0") {
  auto train = grid_dataset(10, 30, 4);
  SamplerConfig cfg;
  cfg.num_negatives = 3;
  auto batch = build_points(train, cfg, 0);
  CHECK(batch.size() == train.num_positives() * 4);
  std::size_t positives = 0;
  for (const auto& ex : batch) {
    if (ex.label == 1) {
      CHECK(train.has(ex.user, ex.item));
      ++positives;
    } else {
      CHECK_FALSE(train.has(ex.user, ex.item));
    }
  }
  CHECK(positives == train.num_positives());
}

TEST_CASE("build_points deterministic per (seed, epoch)") {
  auto train = grid_dataset(8, 20, 3);
  SamplerConfig cfg;
  cfg.seed = 2;
  auto a = build_points(train, cfg, 1);
  auto b = build_points(train, cfg, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].user == b[k].user);
    CHECK(a[k].item == b[k].item);
    CHECK(a[k].label == b[k].label);
  }
}
