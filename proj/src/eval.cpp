#include "dprank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dprank/rng.hpp"

namespace dprank {

std::vector<int> topk_from_scores(const std::vector<double>& scores,
                                  const std::vector<int>& candidates, int k) {
  if (candidates.empty())
    throw std::invalid_argument("topk: empty candidate set");
  std::vector<int> ranked = candidates;
  const auto keep = std::min<std::size_t>(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                    [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  ranked.resize(keep);
  return ranked;
}

std::vector<int> rank_topk(const MFParams& params, int user,
                           const std::vector<int>& candidates, int k) {
  std::vector<double> scores;
  params.score_all(user, scores);
  return topk_from_scores(scores, candidates, k);
}

double recall_at_k(const std::vector<int>& ranked, int test_item) {
  return std::find(ranked.begin(), ranked.end(), test_item) != ranked.end()
             ? 1.0
             : 0.0;
}

double ndcg_at_k(const std::vector<int>& ranked, int test_item) {
  // Single relevant item, so IDCG = 1.
  for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
    if (ranked[pos] == test_item)
      return 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  }
  return 0.0;
}

double arp_of_lists(const std::vector<std::vector<int>>& lists,
                    const PopularityTable& pop) {
  double sum = 0.0;
  int users = 0;
  for (const auto& list : lists) {
    if (list.empty()) continue;
    double mean = 0.0;
    for (int i : list) mean += pop.rank[i];
    sum += mean / static_cast<double>(list.size());
    ++users;
  }
  return users == 0 ? 0.0 : sum / users;
}

double tap_of_lists(const std::vector<std::vector<int>>& lists,
                    const PopularityTable& pop) {
  double sum = 0.0;
  int users = 0;
  for (const auto& list : lists) {
    if (list.empty()) continue;
    int tail = 0;
    for (int i : list) tail += pop.tail_flag[i] ? 1 : 0;
    sum += static_cast<double>(tail) / static_cast<double>(list.size());
    ++users;
  }
  return users == 0 ? 0.0 : sum / users;
}

EvalReport evaluate(const MFParams& params, const SplitDataset& split,
                    const EvalConfig& cfg, const PopularityTable& pop,
                    HeldOutKind held_out) {
  if (cfg.k < 1) throw std::invalid_argument("evaluate: k < 1");
  const auto& target =
      held_out == HeldOutKind::test ? split.test : split.validation;
  const int n = split.train.num_items();

  EvalReport report;
  std::vector<std::vector<int>> lists;
  std::vector<double> scores;

  for (int u = 0; u < split.train.num_users(); ++u) {
    const int held = target[u];
    if (held < 0) continue;

    std::vector<int> candidates;
    if (cfg.protocol == EvalProtocol::full_rank) {
      candidates.reserve(n);
      for (int i = 0; i < n; ++i) {
        if (cfg.exclude_train && i != held && split.train.has(u, i)) continue;
        candidates.push_back(i);
      }
    } else {
      // held-out item plus 99 sampled negatives, excluding all of the
      // user's known positives (train, validation, test).
      candidates.push_back(held);
      auto rng = make_rng(cfg.seed, 0x3939ULL, static_cast<std::uint64_t>(u));
      std::unordered_set<int> taken{held, split.validation[u], split.test[u]};
      std::uniform_int_distribution<int> pick(0, n - 1);
      int guard = 0;
      while (candidates.size() < 100 && guard < 100000) {
        ++guard;
        const int j = pick(rng);
        if (split.train.has(u, j) || taken.count(j)) continue;
        taken.insert(j);
        candidates.push_back(j);
      }
    }

    params.score_all(u, scores);
    auto ranked = topk_from_scores(scores, candidates, cfg.k);
    report.recall += recall_at_k(ranked, held);
    report.ndcg += ndcg_at_k(ranked, held);
    lists.push_back(std::move(ranked));
    ++report.users_evaluated;
  }

  if (report.users_evaluated == 0)
    throw std::runtime_error("evaluate: no evaluable users");
  report.recall /= report.users_evaluated;
  report.ndcg /= report.users_evaluated;
  report.arp = arp_of_lists(lists, pop);
  report.tap = tap_of_lists(lists, pop);
  return report;
}

}  // namespace dprank
