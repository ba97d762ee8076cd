#include <CLI11.hpp>
#include <iostream>

#include "dexp/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"dexp: data exploration scripts with live previews"};
  app.require_subcommand(1);

  std::string assets;
  bool no_images = false;
  bool no_tables = false;
  auto add_library_flags = [&](CLI::App* cmd) {
    cmd->add_option("--assets", assets, "asset directory (images, CSV)");
    cmd->add_flag("--no-images", no_images, "leave out the image library");
    cmd->add_flag("--no-tables", no_tables, "leave out the table library");
  };

  std::string script;
  auto* run = app.add_subcommand("run", "evaluate a script, one preview per command");
  run->add_option("script", script, "script file (.dexp)")->required();
  add_library_flags(run);

  auto* check = app.add_subcommand("check", "report parse and type errors");
  check->add_option("script", script, "script file (.dexp)")->required();
  add_library_flags(check);

  std::uint16_t port = 8765;
  auto* serve = app.add_subcommand("serve", "serve the editor protocol over WebSocket");
  serve->add_option("--port", port, "TCP port, 0 for any free port");
  add_library_flags(serve);

  std::string strategy_text;
  std::string out_csv = "bench.csv";
  auto* bench = app.add_subcommand("bench", "replay an edit script and time it");
  bench->add_option("--script", script, "edit script (JSON array of {text, label})")
      ->required();
  bench->add_option("--strategy", strategy_text, "cbv, lazy or live")
      ->required()
      ->check(CLI::IsMember({"cbv", "lazy", "live"}));
  bench->add_option("--out", out_csv, "CSV output file");
  add_library_flags(bench);

  CLI11_PARSE(app, argc, argv);

  dexp::LibraryConfig libs;
  libs.asset_dir = assets;
  libs.with_images = !no_images;
  libs.with_tables = !no_tables;

  if (*run) return dexp::cli_run(script, libs, std::cout, std::cerr);
  if (*check) return dexp::cli_check(script, libs, std::cout, std::cerr);
  if (*serve) return dexp::cli_serve(port, libs, std::cout, std::cerr);
  if (*bench) {
    return dexp::cli_bench(script, *dexp::parse_strategy(strategy_text), libs,
                           out_csv, std::cout, std::cerr);
  }
  return 1;
}
