#pragma once

#include <cstdint>
#include <vector>

#include "dprank/dataset.hpp"
#include "dprank/exposure.hpp"
#include "dprank/model.hpp"

namespace dprank {

enum class EvalProtocol { full_rank, sampled99 };

struct EvalConfig {
  int k = 5;
  EvalProtocol protocol = EvalProtocol::full_rank;
  bool exclude_train = true;
  std::uint64_t seed = 0;
};

struct EvalReport {
  double recall = 0.0;
  double ndcg = 0.0;
  double arp = 0.0;
  double tap = 0.0;
  int users_evaluated = 0;
};

enum class HeldOutKind { test, validation };

/// Top-k of `candidates` by score, ties broken toward the lower item id.
std::vector<int> topk_from_scores(const std::vector<double>& scores,
                                  const std::vector<int>& candidates, int k);

std::vector<int> rank_topk(const MFParams& params, int user,
                           const std::vector<int>& candidates, int k);

double recall_at_k(const std::vector<int>& ranked, int test_item);
double ndcg_at_k(const std::vector<int>& ranked, int test_item);

// Mean popularity rank / tail share of recommendation lists.
double arp_of_lists(const std::vector<std::vector<int>>& lists,
                    const PopularityTable& pop);
double tap_of_lists(const std::vector<std::vector<int>>& lists,
                    const PopularityTable& pop);

EvalReport evaluate(const MFParams& params, const SplitDataset& split,
                    const EvalConfig& cfg, const PopularityTable& pop,
                    HeldOutKind held_out = HeldOutKind::test);

}  // namespace dprank
