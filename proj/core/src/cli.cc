#include "dexp/cli.h"

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <fstream>
#include <sstream>

#include "dexp/preview.h"
#include "dexp/render.h"
#include "dexp/server.h"
#include "dexp/typecheck.h"

namespace dexp {

std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                             std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path,
                                     std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << path.string() << ": cannot read file\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_diagnostic(std::ostream& err, const std::filesystem::path& path,
                      std::string_view text, std::size_t offset,
                      std::string_view severity, std::string_view message) {
  auto [line, col] = line_col(text, offset);
  err << path.string() << ":" << line << ":" << col << ": " << severity << ": "
      << message << "\n";
}

}  // namespace

int cli_run(const std::filesystem::path& script, const LibraryConfig& libs,
            std::ostream& out, std::ostream& err) {
  auto text = read_file(script, err);
  if (!text) return kExitMissing;
  auto lib = make_library(libs);

  LiveState live;
  live.roots = lib->roots();
  Rebound r = rebind(live, *text);
  int code = kExitOk;
  for (const auto& e : r.program.errors) {
    print_diagnostic(err, script, *text, e.location, "error", e.message);
    code = kExitFailed;
  }
  PreviewCache cache;
  for (auto& [i, preview] : command_previews(r.binding, cache, *lib)) {
    const Command& c = r.program.commands[i];
    if (c.let_name) out << quote_identifier(*c.let_name) << " = ";
    out << render_text(preview) << "\n";
    if (preview.is_evaluated() && preview.value().is_bottom()) code = kExitFailed;
  }
  return code;
}

int cli_check(const std::filesystem::path& script, const LibraryConfig& libs,
              std::ostream& out, std::ostream& err) {
  auto text = read_file(script, err);
  if (!text) return kExitMissing;
  auto lib = make_library(libs);

  LiveState live;
  live.roots = lib->roots();
  Rebound r = rebind(live, *text);
  std::size_t count = 0;
  for (const auto& e : r.program.errors) {
    print_diagnostic(out, script, *text, e.location, "error", e.message);
    ++count;
  }
  TypeCache types;
  for (const auto& d : check_program(r.program, r.binding, *lib, types)) {
    print_diagnostic(out, script, *text, d.span.begin, d.severity, d.message);
    ++count;
  }
  return count ? kExitFailed : kExitOk;
}

int cli_bench(const std::filesystem::path& script, Strategy strategy,
              const LibraryConfig& libs, const std::filesystem::path& csv,
              std::ostream& out, std::ostream& err) {
  EditScript edits;
  try {
    edits = EditScript::load(script);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return std::filesystem::exists(script) ? kExitFailed : kExitMissing;
  }
  auto counter = std::make_shared<CountingLibrary>(make_library(libs));
  auto reports = replay(edits, strategy, counter);
  Summary s = summarize(reports);

  std::ofstream file(csv, std::ios::binary);
  if (!file) {
    err << csv.string() << ": cannot write file\n";
    return kExitFailed;
  }
  file << s.csv;

  std::size_t total = 0;
  for (const auto& r : reports) total += r.total_calls;
  out << strategy_name(strategy) << ": " << reports.size() << " steps, "
      << total << " external calls\n";
  auto print = [&](const char* title, const Histogram& h) {
    out << title << "\n";
    for (const auto& [name, bins] : h.counts) {
      for (std::size_t i = 0; i < bins.size(); ++i) {
        out << "  [" << h.edges[i] << ", " << h.edges[i + 1] << ") ms: "
            << bins[i] << "\n";
      }
    }
  };
  print("delays", s.all);
  print("delays over 15 ms", s.slow);
  return kExitOk;
}

int cli_serve(std::uint16_t port, const LibraryConfig& libs, std::ostream& out,
              std::ostream& err) {
  ServiceConfig config;
  config.asset_dir = libs.asset_dir;
  Service service(config);
  std::unique_ptr<Server> server;
  try {
    server = std::make_unique<Server>(service, port);
  } catch (const std::exception& e) {
    err << "cannot listen on port " << port << ": " << e.what() << "\n";
    return kExitFailed;
  }
  server->start();
  out << "listening on ws://127.0.0.1:" << server->port() << std::endl;

  boost::asio::io_context signals_io;
  boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
  signals.async_wait([](const boost::system::error_code&, int) {});
  signals_io.run();
  server->stop();
  return kExitOk;
}

}  // namespace dexp
