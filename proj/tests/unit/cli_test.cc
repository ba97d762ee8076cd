#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dexp/cli.h"

namespace dexp {
namespace {

const std::filesystem::path kAssets = DEXP_TEST_ASSETS;

LibraryConfig libs() {
  LibraryConfig c;
  c.asset_dir = kAssets;
  return c;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "dexp_cli_test";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

TEST(CliRun, PrintsOneLinePerCommand) {
  std::ostringstream out, err;
  int rc = cli_run(kAssets / "scripts/ranges.dexp", libs(), out, err);
  EXPECT_EQ(rc, kExitOk) << err.str();
  EXPECT_EQ(out.str(),
            "nums = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]\n[0, 1, 4, 9, 16, 25, 36, 49, 64, 81]\n");
}

TEST(CliRun, MedalsScript) {
  std::ostringstream out, err;
  EXPECT_EQ(cli_run(kAssets / "scripts/medals.dexp", libs(), out, err), kExitOk);
  EXPECT_NE(out.str().find("\n8\n"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("Norland | 6"), std::string::npos) << out.str();
}

TEST(CliRun, ImagesPrintReferences) {
  std::ostringstream out, err;
  EXPECT_EQ(cli_run(kAssets / "scripts/images.dexp", libs(), out, err), kExitOk);
  EXPECT_NE(out.str().find("image:128x128:"), std::string::npos) << out.str();
}

TEST(CliRun, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(cli_run(write_temp("empty.dexp", ""), libs(), out, err), kExitOk);
  EXPECT_EQ(cli_run(write_temp("bad.dexp", "data.frob()"), libs(), out, err), kExitFailed);
  std::ostringstream perr;
  EXPECT_EQ(cli_run(write_temp("parse.dexp", "1\nmath.add(1,"), libs(), out, perr),
            kExitFailed);
  EXPECT_NE(perr.str().find("parse.dexp:2:"), std::string::npos) << perr.str();
  EXPECT_EQ(cli_run(kAssets / "absent.dexp", libs(), out, err), kExitMissing);
}

TEST(CliRun, WithoutImagesTheRootIsUnknown) {
  auto cfg = libs();
  cfg.with_images = false;
  std::ostringstream out, err;
  EXPECT_EQ(cli_run(kAssets / "scripts/images.dexp", cfg, out, err), kExitFailed);
}

TEST(CliCheck, ReportsDiagnosticsWithPositions) {
  std::ostringstream out, err;
  EXPECT_EQ(cli_check(kAssets / "scripts/medals.dexp", libs(), out, err), kExitOk);
  EXPECT_EQ(out.str(), "");
  auto p = write_temp("check.dexp", "let x = data.take(2)\nx.frob()\n");
  std::ostringstream o2;
  EXPECT_EQ(cli_check(p, libs(), o2, err), kExitFailed);
  EXPECT_NE(o2.str().find("check.dexp:2:1: error:"), std::string::npos) << o2.str();
  EXPECT_EQ(cli_check(kAssets / "absent.dexp", libs(), out, err), kExitMissing);
}

TEST(CliBench, WritesCsv) {
  auto csv = std::filesystem::temp_directory_path() / "dexp_cli_test" / "bench.csv";
  std::filesystem::create_directories(csv.parent_path());
  std::ostringstream out, err;
  EXPECT_EQ(cli_bench(kAssets / "scripts/image_edits.json", Strategy::kLive, libs(), csv,
                      out, err),
            kExitOk)
      << err.str();
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,label,strategy,ms,total_calls,calls_json");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_NE(line.find(",live,"), std::string::npos);
  }
  EXPECT_EQ(rows, 38u);
  EXPECT_EQ(cli_bench(kAssets / "absent.json", Strategy::kLive, libs(), csv, out, err),
            kExitMissing);
}

TEST(LineCol, OneBased) {
  using LC = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(line_col("ab\ncd", 0), LC(1, 1));
  EXPECT_EQ(line_col("ab\ncd", 4), LC(2, 2));
}

}  // namespace
}  // namespace dexp
