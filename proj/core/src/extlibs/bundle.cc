#include "dexp/extlibs/bundle.h"

#include <cstdlib>

#include "dexp/extlibs/image.h"
#include "dexp/extlibs/listmath.h"
#include "dexp/extlibs/table.h"

#ifndef DEXP_DEFAULT_ASSET_DIR
#define DEXP_DEFAULT_ASSET_DIR "assets"
#endif

namespace dexp {

std::filesystem::path default_asset_dir() {
  if (const char* env = std::getenv("DEXP_ASSETS"); env && *env) return env;
  return DEXP_DEFAULT_ASSET_DIR;
}

std::shared_ptr<const LibrarySet> make_library(const LibraryConfig& config) {
  std::filesystem::path dir =
      config.asset_dir.empty() ? default_asset_dir() : config.asset_dir;
  std::vector<std::shared_ptr<const TypedLibrary>> libs;
  libs.push_back(std::make_shared<ListMathLibrary>(config.data_size));
  if (config.with_images) libs.push_back(std::make_shared<ImageLibrary>(dir));
  if (config.with_tables) {
    libs.push_back(
        std::make_shared<TableLibrary>(dir / config.table_file, config.table_root));
  }
  return std::make_shared<LibrarySet>(std::move(libs));
}

}  // namespace dexp
