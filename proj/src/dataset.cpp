#include "dprank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dprank/rng.hpp"

namespace dprank {

ImplicitDataset ImplicitDataset::from_pairs(
    int num_users, int num_items, std::vector<std::pair<int, int>> pairs) {
  ImplicitDataset ds;
  ds.num_users_ = num_users;
  ds.num_items_ = num_items;
  ds.user_items_.assign(num_users, {});
  ds.item_counts_.assign(num_items, 0);
  for (const auto& [u, i] : pairs) {
    if (u < 0 || u >= num_users || i < 0 || i >= num_items) {
      throw std::out_of_range("interaction (" + std::to_string(u) + "," +
                              std::to_string(i) + ") outside " +
                              std::to_string(num_users) + "x" +
                              std::to_string(num_items));
    }
    ds.user_items_[u].push_back(i);
  }
  for (auto& items : ds.user_items_) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    ds.num_positives_ += items.size();
    for (int i : items) ++ds.item_counts_[i];
  }
  return ds;
}

bool ImplicitDataset::has(int user, int item) const {
  const auto& items = user_items_[user];
  return std::binary_search(items.begin(), items.end(), item);
}

std::vector<std::pair<int, int>> ImplicitDataset::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_positives_);
  for (int u = 0; u < num_users_; ++u)
    for (int i : user_items_[u]) out.emplace_back(u, i);
  return out;
}

RawRatings load_ratings(const std::string& path, char delimiter,
                        const ColumnMap& columns, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ratings file: " + path);
  const int max_col = std::max({columns.user, columns.item, columns.value});
  if (std::min({columns.user, columns.item, columns.value}) < 0)
    throw std::invalid_argument("negative column index");

  RawRatings raw;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delimiter)) fields.push_back(field);
    if (static_cast<int>(fields.size()) <= max_col) {
      ++raw.malformed_lines;
      continue;
    }
    try {
      RawRecord rec;
      rec.user = std::stoll(fields[columns.user]);
      rec.item = std::stoll(fields[columns.item]);
      rec.value = std::stod(fields[columns.value]);
      if (rec.user < 0 || rec.item < 0 || std::isnan(rec.value)) {
        ++raw.malformed_lines;
        continue;
      }
      raw.records.push_back(rec);
    } catch (const std::exception&) {
      ++raw.malformed_lines;
    }
  }
  if (raw.records.empty())
    throw std::runtime_error("zero valid records in " + path);
  return raw;
}

IdMap reindex(RawRatings& raw) {
  IdMap map;
  for (auto& rec : raw.records) {
    auto [uit, unew] = map.user_to_dense.try_emplace(
        rec.user, static_cast<int>(map.user_to_dense.size()));
    auto [iit, inew] = map.item_to_dense.try_emplace(
        rec.item, static_cast<int>(map.item_to_dense.size()));
    rec.user = uit->second;
    rec.item = iit->second;
  }
  return map;
}

ImplicitDataset binarize(const RawRatings& raw, double threshold,
                         int num_users, int num_items) {
  if (std::isnan(threshold) || std::isinf(threshold))
    throw std::invalid_argument("threshold must be finite");
  // Last record for a (user,item) pair wins.
  std::unordered_map<std::int64_t, double> last;
  last.reserve(raw.records.size());
  for (const auto& rec : raw.records) {
    if (rec.user >= num_users || rec.item >= num_items)
      throw std::out_of_range("record id exceeds declared dimensions");
    last[rec.user * static_cast<std::int64_t>(num_items) + rec.item] =
        rec.value;
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [key, value] : last) {
    if (value >= threshold) {
      pairs.emplace_back(static_cast<int>(key / num_items),
                         static_cast<int>(key % num_items));
    }
  }
  return ImplicitDataset::from_pairs(num_users, num_items, std::move(pairs));
}

SplitDataset leave_one_out_split(const ImplicitDataset& ds,
                                 std::uint64_t seed) {
  if (ds.num_positives() == 0)
    throw std::invalid_argument("cannot split an empty dataset");
  SplitDataset split;
  split.validation.assign(ds.num_users(), -1);
  split.test.assign(ds.num_users(), -1);
  std::vector<std::pair<int, int>> train_pairs;
  train_pairs.reserve(ds.num_positives());
  for (int u = 0; u < ds.num_users(); ++u) {
    const auto& items = ds.items_of(u);
    if (items.size() < 3) {
      if (!items.empty()) ++split.skipped_users;
      for (int i : items) train_pairs.emplace_back(u, i);
      continue;
    }
    auto rng = make_rng(seed, static_cast<std::uint64_t>(u));
    std::size_t test_idx =
        std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng);
    std::size_t val_idx =
        std::uniform_int_distribution<std::size_t>(0, items.size() - 2)(rng);
    if (val_idx >= test_idx) ++val_idx;
    split.test[u] = items[test_idx];
    split.validation[u] = items[val_idx];
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (k != test_idx && k != val_idx) train_pairs.emplace_back(u, items[k]);
    }
  }
  split.train = ImplicitDataset::from_pairs(ds.num_users(), ds.num_items(),
                                            std::move(train_pairs));
  return split;
}

ImplicitDataset mix_mar(const ImplicitDataset& train_mnar,
                        const ImplicitDataset& mar, double pct,
                        std::uint64_t seed) {
  if (train_mnar.num_users() != mar.num_users() ||
      train_mnar.num_items() != mar.num_items())
    throw std::invalid_argument("mix_mar: dataset dimensions disagree");
  if (pct < 0.0 || pct > 1.0)
    throw std::invalid_argument("mix_mar: pct must lie in [0,1]");

  std::vector<std::pair<int, int>> candidates;
  for (const auto& [u, i] : mar.pairs()) {
    if (!train_mnar.has(u, i)) candidates.emplace_back(u, i);
  }
  auto rng = make_rng(seed, 0x6d6172ULL);  // "mar"
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto take = static_cast<std::size_t>(
      std::llround(pct * static_cast<double>(candidates.size())));

  auto pairs = train_mnar.pairs();
  pairs.insert(pairs.end(), candidates.begin(), candidates.begin() + take);
  return ImplicitDataset::from_pairs(train_mnar.num_users(),
                                     train_mnar.num_items(), std::move(pairs));
}

}  // namespace dprank
