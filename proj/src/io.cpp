#include "dprank/io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dprank {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_heldout_csv(const std::string& path, const std::vector<int>& items) {
  std::ofstream out(path);
  out << "user,item\n";
  for (std::size_t u = 0; u < items.size(); ++u) {
    if (items[u] >= 0) out << u << "," << items[u] << "\n";
  }
}

std::vector<std::pair<int, int>> read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<int, int>> pairs;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed pair row in " + path);
    pairs.emplace_back(std::stoi(line.substr(0, comma)),
                       std::stoi(line.substr(comma + 1)));
  }
  return pairs;
}

}  // namespace

void save_pairs_csv(const std::string& path, const ImplicitDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "user,item\n";
  for (const auto& [u, i] : ds.pairs()) out << u << "," << i << "\n";
}

void save_split(const std::string& dir, const SplitDataset& split,
                std::uint64_t split_seed) {
  fs::create_directories(dir);
  json manifest;
  manifest["num_users"] = split.train.num_users();
  manifest["num_items"] = split.train.num_items();
  manifest["train_positives"] = split.train.num_positives();
  manifest["split_seed"] = split_seed;
  manifest["skipped_users"] = split.skipped_users;
  std::ofstream(dir + "/manifest.json") << manifest.dump(2) << "\n";

  save_pairs_csv(dir + "/train.csv", split.train);
  write_heldout_csv(dir + "/validation.csv", split.validation);
  write_heldout_csv(dir + "/test.csv", split.test);
}

SplitDataset load_split(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw std::runtime_error("missing manifest.json in " + dir);
  json manifest = json::parse(mf);
  const int num_users = manifest.at("num_users");
  const int num_items = manifest.at("num_items");

  SplitDataset split;
  split.train = ImplicitDataset::from_pairs(
      num_users, num_items, read_pairs_csv(dir + "/train.csv"));
  split.validation.assign(num_users, -1);
  split.test.assign(num_users, -1);
  for (const auto& [u, i] : read_pairs_csv(dir + "/validation.csv"))
    split.validation[u] = i;
  for (const auto& [u, i] : read_pairs_csv(dir + "/test.csv"))
    split.test[u] = i;
  split.skipped_users = manifest.value("skipped_users", 0);
  return split;
}

namespace {
constexpr std::uint32_t kCheckpointMagic = 0x4450524bU;  // "DPRK"
}

void save_checkpoint(const std::string& path, const MFParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(&kCheckpointMagic, sizeof(kCheckpointMagic));
  put(&params.num_users, sizeof(int));
  put(&params.num_items, sizeof(int));
  put(&params.dim, sizeof(int));
  put(params.user_factors.data(), params.user_factors.size() * sizeof(double));
  put(params.item_factors.data(), params.item_factors.size() * sizeof(double));
}

MFParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated checkpoint " + path);
  };
  std::uint32_t magic = 0;
  get(&magic, sizeof(magic));
  if (magic != kCheckpointMagic)
    throw std::runtime_error("not a checkpoint file: " + path);
  MFParams params;
  get(&params.num_users, sizeof(int));
  get(&params.num_items, sizeof(int));
  get(&params.dim, sizeof(int));
  params.user_factors.resize(static_cast<std::size_t>(params.num_users) *
                             params.dim);
  params.item_factors.resize(static_cast<std::size_t>(params.num_items) *
                             params.dim);
  get(params.user_factors.data(), params.user_factors.size() * sizeof(double));
  get(params.item_factors.data(), params.item_factors.size() * sizeof(double));
  return params;
}

void export_embeddings(const std::string& users_path,
                       const std::string& items_path, const MFParams& params) {
  auto dump = [&](const std::string& path, const std::vector<double>& mat,
                  int rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "id";
    for (int k = 0; k < params.dim; ++k) out << ",v" << k;
    out << "\n";
    out.precision(10);
    for (int r = 0; r < rows; ++r) {
      out << r;
      for (int k = 0; k < params.dim; ++k)
        out << "," << mat[static_cast<std::size_t>(r) * params.dim + k];
      out << "\n";
    }
  };
  dump(users_path, params.user_factors, params.num_users);
  dump(items_path, params.item_factors, params.num_items);
}

}  // namespace dprank
