#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "heatguide/errors.hpp"
#include "heatguide/json_canonical.hpp"
#include "heatguide/serialization.hpp"
#include "heatguide/version.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace {

using heatguide::tools::ExperimentConfig;

void print_error_json(const std::string& type, const std::string& message) {
  nlohmann::json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << heatguide::canonical_json_dump(j);
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--config", opt.config_path, "JSON configuration file");
  sub->add_option("--out", opt.out_dir, "Output directory (overrides config/output_dir)");
  sub->add_option("--set", opt.overrides,
                  "Override a config key, e.g. --set cross_section.a=3.14")
      ->take_all();
  sub->add_option("--seed", opt.seed, "Override the top-level seed")
      ->each([&opt](const std::string&) { opt.has_seed = true; });
}

int run(const std::string& name, const CommonOptions& opt) {
  nlohmann::json doc = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    if (!std::filesystem::exists(opt.config_path)) {
      throw heatguide::io_error("config file not found: '" + opt.config_path + "'");
    }
    const std::string text = heatguide::read_text_file(opt.config_path);
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw heatguide::tools::config_error("config parse error in '" + opt.config_path +
                                           "': " + e.what());
    }
  }
  for (const auto& ov : opt.overrides) heatguide::tools::apply_override(doc, ov);
  if (opt.has_seed) doc["seed"] = opt.seed;

  ExperimentConfig cfg = heatguide::tools::config_from_json(doc);
  std::string out_dir = cfg.output_dir;
  if (const char* env = std::getenv("HEATGUIDE_OUT"); env && *env) out_dir = env;
  if (!opt.out_dir.empty()) out_dir = opt.out_dir;

  heatguide::tools::run_subcommand(name, cfg, out_dir);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"heatguide: modal forward solving, Carleman-weight verification and "
               "regularized source reconstruction for the heat equation in a cylindrical "
               "waveguide"};
  app.set_version_flag("--version", heatguide::kVersion);
  app.require_subcommand(1);

  static const std::vector<std::string> names = {"forward",       "invert",  "sweep",
                                                 "carleman",      "observability",
                                                 "check-energy"};
  static const std::vector<std::string> descriptions = {
      "Solve the source problem and emit the Neumann trace",
      "Reconstruct the source coefficients from a trace file",
      "Noise sweep against the log-stability modulus",
      "Verify the weight lemma and scan the Carleman constant",
      "Estimate the empirical observability constant",
      "Check the two a-priori energy estimates"};

  std::vector<CommonOptions> opts(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    add_common(sub, opts[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!app.got_subcommand(names[i])) continue;
    try {
      return run(names[i], opts[i]);
    } catch (const heatguide::tools::config_error& e) {
      print_error_json("config_error", e.what());
      return 2;
    } catch (const heatguide::overflow_guard_error& e) {
      print_error_json("overflow_guard", e.what());
      return 4;
    } catch (const heatguide::io_error& e) {
      print_error_json("io_error", e.what());
      return 5;
    } catch (const std::filesystem::filesystem_error& e) {
      print_error_json("io_error", e.what());
      return 5;
    } catch (const heatguide::precondition_error& e) {
      print_error_json("precondition", e.what());
      return 3;
    } catch (const std::invalid_argument& e) {
      print_error_json("precondition", e.what());
      return 3;
    } catch (const std::domain_error& e) {
      print_error_json("precondition", e.what());
      return 3;
    } catch (const std::exception& e) {
      print_error_json("internal", e.what());
      return 1;
    }
  }
  return 1;
}
