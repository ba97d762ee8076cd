#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "dexp/library.h"

namespace dexp {

struct LibraryConfig {
  std::filesystem::path asset_dir;
  bool with_images = true;
  bool with_tables = true;
  std::int64_t data_size = 100;
  std::string table_file = "olympics.csv";
  std::string table_root = "olympics";
};

/// $DEXP_ASSETS if set, otherwise the asset directory of the source tree.
std::filesystem::path default_asset_dir();

/// List/math plus, as configured, image and table libraries. An empty
/// asset_dir means default_asset_dir().
std::shared_ptr<const LibrarySet> make_library(const LibraryConfig& config = {});

}  // namespace dexp
