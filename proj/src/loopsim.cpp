#include "dprank/loopsim.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "dprank/eval.hpp"
#include "dprank/rng.hpp"
#include "dprank/trainer.hpp"

namespace dprank {

void SimConfig::validate() const {
  if (num_users <= 0 || num_items <= 0)
    throw std::invalid_argument("sim: empty dimensions");
  if (init_items_per_user <= 0 || init_items_per_user > num_items)
    throw std::invalid_argument("sim: infeasible init_items_per_user");
  if (accept_k < 1 || accept_k > rec_top)
    throw std::invalid_argument("sim: accept_k must lie in [1, rec_top]");
  if (loops < 0) throw std::invalid_argument("sim: loops < 0");
  if (epochs_per_loop < 1) throw std::invalid_argument("sim: epochs_per_loop < 1");
}

ImplicitDataset gen_initial(const SimConfig& cfg) {
  cfg.validate();
  const int edges = cfg.num_users * cfg.init_items_per_user;

  // Item stubs spread as evenly as possible, then dealt to users in shuffled
  // order. Duplicate items within a user are resampled by swapping with a
  // random stub further down the deck.
  std::vector<int> stubs;
  stubs.reserve(edges);
  for (int e = 0; e < edges; ++e) stubs.push_back(e % cfg.num_items);
  auto rng = make_rng(cfg.seed, 0x73696dULL);  // "sim"
  std::shuffle(stubs.begin(), stubs.end(), rng);

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edges);
  std::uniform_int_distribution<int> any_item(0, cfg.num_items - 1);
  for (int u = 0; u < cfg.num_users; ++u) {
    const int base = u * cfg.init_items_per_user;
    std::unordered_set<int> seen;
    for (int k = 0; k < cfg.init_items_per_user; ++k) {
      int tries = 0;
      while (seen.count(stubs[base + k]) && tries < 64) {
        std::uniform_int_distribution<int> other(base + k, edges - 1);
        std::swap(stubs[base + k], stubs[other(rng)]);
        ++tries;
      }
      while (seen.count(stubs[base + k])) stubs[base + k] = any_item(rng);
      seen.insert(stubs[base + k]);
      pairs.emplace_back(u, stubs[base + k]);
    }
  }
  return ImplicitDataset::from_pairs(cfg.num_users, cfg.num_items,
                                     std::move(pairs));
}

namespace {

std::vector<int> unobserved_candidates(const ImplicitDataset& ds, int user) {
  std::vector<int> out;
  out.reserve(ds.num_items());
  for (int i = 0; i < ds.num_items(); ++i)
    if (!ds.has(user, i)) out.push_back(i);
  return out;
}

}  // namespace

LoopState run_simulation(const SimConfig& cfg, const Recommender& recommender) {
  cfg.validate();
  LoopState state;
  state.dataset = gen_initial(cfg);

  for (int loop = 1; loop <= cfg.loops; ++loop) {
    // Train from scratch each generation on the cumulative data.
    Hyperparams hp = cfg.hp;
    hp.epochs = cfg.epochs_per_loop;
    hp.seed = mix64(cfg.seed, 0x747261696eULL, static_cast<std::uint64_t>(loop));
    SamplerConfig sampler = cfg.sampler;
    sampler.seed = hp.seed;

    MFParams params;
    try {
      params = fit(state.dataset, hp, sampler);
    } catch (const std::runtime_error&) {
      state.aborted = true;
      return state;
    }

    LoopRecord rec;
    rec.loop = loop;
    const auto pop = popularity(state.dataset);
    std::vector<std::vector<int>> metric_lists;
    std::vector<std::pair<int, int>> accepted;

    auto rng = make_rng(cfg.seed, 0x616363ULL, static_cast<std::uint64_t>(loop));
    for (int u = 0; u < cfg.num_users; ++u) {
      std::vector<int> slate;
      if (recommender) {
        slate = recommender(u, params, state.dataset, cfg.rec_top);
      } else {
        auto candidates = unobserved_candidates(state.dataset, u);
        if (candidates.empty()) continue;
        std::vector<double> scores;
        params.score_all(u, scores);
        slate = topk_from_scores(scores, candidates, cfg.rec_top);
        metric_lists.push_back(
            topk_from_scores(scores, candidates, cfg.metric_k));
      }
      // User accepts accept_k of the slate uniformly at random.
      std::vector<int> picks = slate;
      std::shuffle(picks.begin(), picks.end(), rng);
      const int take = std::min<int>(cfg.accept_k, picks.size());
      for (int k = 0; k < take; ++k) {
        if (!state.dataset.has(u, picks[k])) accepted.emplace_back(u, picks[k]);
      }
    }

    auto pairs = state.dataset.pairs();
    rec.new_interactions = static_cast<int>(accepted.size());
    pairs.insert(pairs.end(), accepted.begin(), accepted.end());
    state.dataset = ImplicitDataset::from_pairs(cfg.num_users, cfg.num_items,
                                                std::move(pairs));
    rec.cumulative = static_cast<std::int64_t>(state.dataset.num_positives());
    rec.tap_of_recs = tap_of_lists(metric_lists, pop);
    rec.arp_of_recs = arp_of_lists(metric_lists, pop);
    state.per_loop.push_back(rec);
    state.generation = loop;
  }
  return state;
}

std::vector<MethodCurve> compare_methods(
    const std::vector<SimConfig>& cfgs,
    const std::vector<std::uint64_t>& seeds) {
  std::vector<MethodCurve> curves;
  for (const auto& cfg : cfgs) {
    for (auto seed : seeds) {
      SimConfig run_cfg = cfg;
      run_cfg.seed = seed;
      auto state = run_simulation(run_cfg);
      curves.push_back({cfg.hp.loss, seed, std::move(state.per_loop)});
    }
  }
  return curves;
}

}  // namespace dprank
