// whodge: batch driver for the weighted Hodge checks.
//
//   whodge run <config.json> [--out report.json] [--csv records.csv]
//   whodge converge <config.json> [--out report.json] [--csv records.csv]
//   whodge list-presets
//
// Exit status: 0 all records pass or are not_applicable, 1 any failure,
// 2 configuration error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "whodge/cli.hpp"
#include "whodge/error.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

int execute(const std::string& config_path, const std::string& out_path, const std::string& csv_path,
            bool convergence) {
  whodge::cli::RunConfig cfg;
  whodge::cli::Report rep;
  try {
    cfg = whodge::cli::load_config(config_path);
    rep = whodge::cli::run(cfg, convergence);
  } catch (const whodge::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  const std::string out = out_path.empty() ? cfg.output : out_path;
  if (out.empty()) {
    std::cout << rep.dump();
  } else if (!write_file(out, rep.dump())) {
    std::cerr << "cannot write " << out << "\n";
    return 2;
  }
  if (!csv_path.empty() && !write_file(csv_path, rep.csv())) {
    std::cerr << "cannot write " << csv_path << "\n";
    return 2;
  }
  std::cerr << "pass " << rep.n_pass << ", fail " << rep.n_fail << ", not_applicable " << rep.n_na << "\n";
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Hodge Laplacian checks"};
  app.require_subcommand(1);

  std::string config, out, csv;
  auto* run = app.add_subcommand("run", "Run the checks of a config");
  run->add_option("config", config, "config JSON")->required();
  run->add_option("--out", out, "report path (default: config output, else stdout)");
  run->add_option("--csv", csv, "CSV path for the records");

  auto* conv = app.add_subcommand("converge", "Run a config and fit convergence orders");
  conv->add_option("config", config, "config JSON")->required();
  conv->add_option("--out", out, "report path (default: config output, else stdout)");
  conv->add_option("--csv", csv, "CSV path for the records");

  app.add_subcommand("list-presets", "List domains, potentials, check ids and test forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (app.got_subcommand("list-presets")) {
      std::cout << whodge::cli::list_presets();
      return 0;
    }
    return execute(config, out, csv, app.got_subcommand("converge"));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
