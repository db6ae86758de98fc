#ifndef HEATGUIDE_TOOLS_CONFIG_HPP
#define HEATGUIDE_TOOLS_CONFIG_HPP

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatguide/cross_section.hpp"
#include "heatguide/inverse.hpp"
#include "heatguide/kgrid.hpp"
#include "heatguide/time_grid.hpp"

namespace heatguide::tools {

/// Bad or unknown configuration content (exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Fully-resolved experiment configuration. One human-readable JSON file,
/// nested per module; CLI --set overrides map one-for-one onto dotted key
/// paths. Unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "out";

  CrossSection cross_section{3.141592653589793, GammaSide::RightEnd, 16};
  KGrid kgrid{2.0, 64};
  TimeGrid time{1.0, 512};

  std::string sigma_kind = "constant"; // constant | exp_decay
  double sigma_mu = 1.0;

  std::string beta_kind = "random"; // random | file
  double beta_energy_cap = 30.0;
  double beta_h1_scale = 1.0;
  std::uint64_t beta_seed = 43; // seed + 1 unless set explicitly
  std::string beta_path;

  double noise_delta = 0.0;
  std::uint64_t noise_seed = 44;

  double carleman_rho = 4.0;
  double carleman_rho0 = 4.0;
  double carleman_c_shift = 1.0;
  std::vector<double> carleman_lambda_list; // empty: {1,2,4,8} * lambda0
  int carleman_n_t = 64;
  int carleman_n_x = 64;

  int inverse_l_fit = 16;
  std::optional<double> inverse_ridge;
  std::string inverse_cutoff_policy = "paper-rule"; // paper-rule | fixed
  double inverse_fixed_lambda_cut = 0.0;
  double inverse_m_budget = 1.0;

  std::string invert_trace_csv;
  std::string invert_trace_sidecar = "";

  std::vector<double> sweep_deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::uint64_t sweep_seed = 45;

  int observability_sample_size = 50;
  double observability_energy_cap = 30.0;
  std::uint64_t observability_seed = 46;

  int check_energy_n_pairs = 20;
  double check_energy_cap = 30.0;
  std::uint64_t check_energy_seed = 47;

  InversionConfig inversion_config() const;
};

/// Parse and validate; rejects unknown keys at any nesting level.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Canonical re-serialization of the resolved configuration (defaults
/// filled in); the config hash is taken over this.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Apply one "dotted.path=value" override onto the raw JSON document.
void apply_override(nlohmann::json& doc, const std::string& assignment);

} // namespace heatguide::tools

#endif
