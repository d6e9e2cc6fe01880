#include "vw/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"V-W shooting: bounded global solutions with certificates"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, example;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool list = false;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--example", example, "run a built-in system with its default configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "sampler seed");
  app.add_option("--tol", tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--list-examples", list, "list built-in systems");

  auto* render = app.add_subcommand("render", "summarize report files");
  std::vector<std::string> files;
  render->add_option("reports", files, "report.json files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  if (list) {
    for (const vw::ExampleInfo& e : vw::examples())
      std::cout << e.name << "  (" << e.pipeline << ")  " << e.description << "\n";
    return 0;
  }

  if (render->parsed()) {
    try {
      std::vector<vw::Json> reports;
      for (const std::string& f : files) {
        std::ifstream in(f);
        if (!in) throw vw::Error(vw::ErrorCode::MalformedReport, "cannot open " + f);
        try {
          reports.push_back(vw::Json::parse(in));
        } catch (const nlohmann::json::exception& e) {
          throw vw::Error(vw::ErrorCode::MalformedReport, f + ": " + e.what());
        }
      }
      std::cout << vw::render_reports(reports);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }

  vw::RunConfig cfg;
  try {
    if (!config_path.empty() && !example.empty())
      throw vw::Error(vw::ErrorCode::ConfigError, "--config and --example are exclusive");
    if (!config_path.empty()) cfg = vw::RunConfig::load(config_path);
    else if (!example.empty()) cfg = vw::example_config(example);
    else throw vw::Error(vw::ErrorCode::ConfigError, "one of --config or --example is required");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  if (!out_dir.empty()) cfg.output = out_dir;
  if (seed) cfg.seed = *seed;
  if (tol) cfg.tolerances.rtol = *tol;

  const vw::RunOutcome r = vw::run(cfg);
  if (r.exit_code == 3) {
    std::cerr << "error: " << r.message << "\n";
    return 3;
  }
  if (!r.report.is_null()) {
    try {
      std::cout << vw::render_report(r.report);
    } catch (const std::exception&) {
    }
  }
  for (const std::string& f : r.written) std::cout << "wrote " << f << "\n";
  if (r.exit_code == 2) std::cerr << r.message << "\n";
  return r.exit_code;
}
