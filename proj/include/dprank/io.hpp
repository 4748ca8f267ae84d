#pragma once

#include <string>

#include "dprank/dataset.hpp"
#include "dprank/model.hpp"

namespace dprank {

/// Dataset directory layout:
///   manifest.json                dimensions, counts, split seed
///   train.csv / validation.csv / test.csv   "user,item" rows with header
void save_split(const std::string& dir, const SplitDataset& split,
                std::uint64_t split_seed);
SplitDataset load_split(const std::string& dir);

void save_pairs_csv(const std::string& path, const ImplicitDataset& ds);

// Binary checkpoint: magic, dims, raw doubles.
void save_checkpoint(const std::string& path, const MFParams& params);
MFParams load_checkpoint(const std::string& path);

// CSV export: one row per id, "id,v0,...,v{d-1}".
void export_embeddings(const std::string& users_path,
                       const std::string& items_path, const MFParams& params);

}  // namespace dprank
