#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dprank {

struct RawRecord {
  std::int64_t user;
  std::int64_t item;
  double value;
};

/// Parsed interaction log before binarization. Records keep file order;
/// duplicate (user,item) pairs are resolved later by keeping the last one.
struct RawRatings {
  std::vector<RawRecord> records;
  std::size_t malformed_lines = 0;
};

struct ColumnMap {
  int user = 0;
  int item = 1;
  int value = 2;
};

/// Sparse binary interaction matrix. Immutable after construction.
class ImplicitDataset {
 public:
  ImplicitDataset() = default;

  // Builds from (user,item) pairs; duplicates collapse.
  static ImplicitDataset from_pairs(int num_users, int num_items,
                                    std::vector<std::pair<int, int>> pairs);

  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }
  std::size_t num_positives() const { return num_positives_; }

  bool has(int user, int item) const;
  const std::vector<int>& items_of(int user) const { return user_items_[user]; }
  const std::vector<std::int64_t>& item_counts() const { return item_counts_; }

  // Flat (user,item) view in user-major, item-ascending order.
  std::vector<std::pair<int, int>> pairs() const;

 private:
  int num_users_ = 0;
  int num_items_ = 0;
  std::size_t num_positives_ = 0;
  std::vector<std::vector<int>> user_items_;  // sorted per user
  std::vector<std::int64_t> item_counts_;
};

/// Leave-one-out split. validation/test hold one item index per user,
/// or -1 for users with too few positives to be eligible.
struct SplitDataset {
  ImplicitDataset train;
  std::vector<int> validation;
  std::vector<int> test;
  int skipped_users = 0;
};

/// Dense re-indexing of arbitrary raw ids.
struct IdMap {
  std::unordered_map<std::int64_t, int> user_to_dense;
  std::unordered_map<std::int64_t, int> item_to_dense;
};

RawRatings load_ratings(const std::string& path, char delimiter,
                        const ColumnMap& columns, bool skip_header);

// Rewrites raw ids to contiguous [0,M)x[0,N), first-seen order.
IdMap reindex(RawRatings& raw);

ImplicitDataset binarize(const RawRatings& raw, double threshold,
                         int num_users, int num_items);

SplitDataset leave_one_out_split(const ImplicitDataset& ds,
                                 std::uint64_t seed);

ImplicitDataset mix_mar(const ImplicitDataset& train_mnar,
                        const ImplicitDataset& mar, double pct,
                        std::uint64_t seed);

}  // namespace dprank
