#include "dprank/loopsim.hpp"

#include <set>

#include "doctest.h"
#include "dprank/eval.hpp"
#include "dprank/rng.hpp"

using namespace dprank;

namespace {

SimConfig tiny_cfg() {
  SimConfig cfg;
  cfg.num_users = 30;
  cfg.num_items = 60;
  cfg.init_items_per_user = 5;
  cfg.init_users_per_item = 5;
  cfg.accept_k = 2;
  cfg.rec_top = 5;
  cfg.metric_k = 10;
  cfg.loops = 3;
  cfg.epochs_per_loop = 2;
  cfg.seed = 4;
  cfg.hp.dim = 8;
  cfg.hp.loss = LossKind::bpr;
  cfg.sampler.num_negatives = 3;
  return cfg;
}

}  // namespace

TEST_CASE("gen_initial honors per-user degree and total edge count") {
  SimConfig cfg;
  cfg.hp.dim = 8;
  auto ds = gen_initial(cfg);
  CHECK(ds.num_positives() == 200 * 20);
  for (int u = 0; u < cfg.num_users; ++u)
    CHECK(ds.items_of(u).size() == 20);
}

TEST_CASE("gen_initial deterministic given the seed") {
  auto cfg = tiny_cfg();
  CHECK(gen_initial(cfg).pairs() == gen_initial(cfg).pairs());
  cfg.seed = 99;
  CHECK(gen_initial(tiny_cfg()).pairs() != gen_initial(cfg).pairs());
}

TEST_CASE("gen_initial rejects infeasible degrees") {
  auto cfg = tiny_cfg();
  cfg.init_items_per_user = cfg.num_items + 1;
  CHECK_THROWS(gen_initial(cfg));
}

TEST_CASE("zero loops returns the initial dataset with no records") {
  auto cfg = tiny_cfg();
  cfg.loops = 0;
  auto state = run_simulation(cfg);
  CHECK(state.per_loop.empty());
  CHECK(state.generation == 0);
  CHECK(state.dataset.pairs() == gen_initial(cfg).pairs());
}

TEST_CASE("simulation stays under the theoretical interaction curve") {
  auto cfg = tiny_cfg();
  auto state = run_simulation(cfg);
  REQUIRE(state.per_loop.size() == 3);
  const auto initial = gen_initial(cfg).num_positives();
  std::int64_t prev = static_cast<std::int64_t>(initial);
  for (const auto& rec : state.per_loop) {
    CHECK(rec.new_interactions <= cfg.accept_k * cfg.num_users);
    CHECK(rec.cumulative >= prev);  // non-decreasing
    CHECK(rec.cumulative <=
          static_cast<std::int64_t>(initial) +
              static_cast<std::int64_t>(cfg.accept_k) * cfg.num_users *
                  rec.loop);
    prev = rec.cumulative;
  }
}

TEST_CASE("model-driven recommendations are always unobserved, so every "
          "accepted pick is new") {
  auto cfg = tiny_cfg();
  auto state = run_simulation(cfg);
  for (const auto& rec : state.per_loop)
    CHECK(rec.new_interactions == cfg.accept_k * cfg.num_users);
}

TEST_CASE("a fixed-slate recommender collapses into a filter bubble") {
  auto cfg = tiny_cfg();
  cfg.loops = 6;
  // degenerate recommender: the same rec_top items for everyone, ignoring
  // what they already interacted with
  Recommender fixed = [](int, const MFParams&, const ImplicitDataset&, int k) {
    std::vector<int> slate(k);
    for (int i = 0; i < k; ++i) slate[i] = i;
    return slate;
  };
  cfg.loops = 12;
  auto state = run_simulation(cfg, fixed);
  // 5-item pool, 2 accepts per loop: exhausted within a few loops
  std::int64_t uptake = 0;
  for (const auto& rec : state.per_loop) uptake += rec.new_interactions;
  CHECK(uptake <= cfg.num_users * cfg.rec_top);
  CHECK(state.per_loop.back().new_interactions <
        state.per_loop.front().new_interactions / 10 + 1);
}

TEST_CASE("uniform random recommender keeps uptake near k*M") {
  auto cfg = tiny_cfg();
  cfg.loops = 4;
  Recommender random_rec = [&](int user, const MFParams&,
                               const ImplicitDataset& current, int k) {
    auto rng = make_rng(123, static_cast<std::uint64_t>(user),
                        current.num_positives());
    std::vector<int> unobserved;
    for (int i = 0; i < current.num_items(); ++i)
      if (!current.has(user, i)) unobserved.push_back(i);
    std::shuffle(unobserved.begin(), unobserved.end(), rng);
    unobserved.resize(std::min<std::size_t>(k, unobserved.size()));
    return unobserved;
  };
  auto state = run_simulation(cfg, random_rec);
  for (const auto& rec : state.per_loop)
    CHECK(rec.new_interactions == cfg.accept_k * cfg.num_users);
}

TEST_CASE("same config and seed reproduce identical curves") {
  auto cfg = tiny_cfg();
  auto a = run_simulation(cfg);
  auto b = run_simulation(cfg);
  REQUIRE(a.per_loop.size() == b.per_loop.size());
  for (std::size_t k = 0; k < a.per_loop.size(); ++k) {
    CHECK(a.per_loop[k].cumulative == b.per_loop[k].cumulative);
    CHECK(a.per_loop[k].tap_of_recs == b.per_loop[k].tap_of_recs);
    CHECK(a.per_loop[k].arp_of_recs == b.per_loop[k].arp_of_recs);
  }
}

TEST_CASE("compare_methods runs the grid and tags curves") {
  auto cfg = tiny_cfg();
  cfg.loops = 2;
  auto dpr_cfg = cfg;
  dpr_cfg.hp.loss = LossKind::dpr;
  auto curves = compare_methods({cfg, dpr_cfg}, {1, 2});
  REQUIRE(curves.size() == 4);
  CHECK(curves[0].loss == LossKind::bpr);
  CHECK(curves[3].loss == LossKind::dpr);
  CHECK(curves[0].records.size() == 2);
}
