#include "config.hpp"

#include <set>

namespace heatguide::tools {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& keys,
                    const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!keys.count(it.key())) {
      throw config_error("unknown config key '" + scope + it.key() + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

InversionConfig ExperimentConfig::inversion_config() const {
  InversionConfig ic;
  ic.l_fit = inverse_l_fit;
  ic.ridge = inverse_ridge;
  if (inverse_cutoff_policy == "paper-rule") {
    ic.cutoff_policy = CutoffPolicy::PaperRule;
  } else if (inverse_cutoff_policy == "fixed") {
    ic.cutoff_policy = CutoffPolicy::Fixed;
  } else {
    throw config_error("inverse.cutoff_policy must be 'paper-rule' or 'fixed'");
  }
  ic.fixed_lambda_cut = inverse_fixed_lambda_cut;
  ic.m_budget = inverse_m_budget;
  return ic;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  reject_unknown(j,
                 {"seed", "output_dir", "cross_section", "kgrid", "time", "sigma", "beta",
                  "noise", "carleman", "inverse", "invert", "sweep", "observability",
                  "check_energy"},
                 "");
  try {
    read(j, "seed", cfg.seed);
    read(j, "output_dir", cfg.output_dir);

    // Per-task seeds derive from the top-level seed unless given explicitly.
    cfg.beta_seed = cfg.seed + 1;
    cfg.noise_seed = cfg.seed + 2;
    cfg.sweep_seed = cfg.seed + 3;
    cfg.observability_seed = cfg.seed + 4;
    cfg.check_energy_seed = cfg.seed + 5;

    if (j.contains("cross_section")) {
      const auto& s = j.at("cross_section");
      reject_unknown(s, {"a", "gamma_side", "l_max"}, "cross_section.");
      read(s, "a", cfg.cross_section.a);
      if (s.contains("gamma_side")) {
        const std::string side = s.at("gamma_side").get<std::string>();
        if (side == "left") {
          cfg.cross_section.gamma_side = GammaSide::LeftEnd;
        } else if (side == "right") {
          cfg.cross_section.gamma_side = GammaSide::RightEnd;
        } else {
          throw config_error("cross_section.gamma_side must be 'left' or 'right'");
        }
      }
      read(s, "l_max", cfg.cross_section.l_max);
    }
    if (j.contains("kgrid")) {
      const auto& s = j.at("kgrid");
      reject_unknown(s, {"k_max", "n_k"}, "kgrid.");
      read(s, "k_max", cfg.kgrid.k_max);
      read(s, "n_k", cfg.kgrid.n_k);
    }
    if (j.contains("time")) {
      const auto& s = j.at("time");
      reject_unknown(s, {"T", "n_t"}, "time.");
      read(s, "T", cfg.time.T);
      read(s, "n_t", cfg.time.n_t);
    }
    if (j.contains("sigma")) {
      const auto& s = j.at("sigma");
      reject_unknown(s, {"kind", "mu"}, "sigma.");
      read(s, "kind", cfg.sigma_kind);
      read(s, "mu", cfg.sigma_mu);
      if (cfg.sigma_kind != "constant" && cfg.sigma_kind != "exp_decay") {
        throw config_error("sigma.kind must be 'constant' or 'exp_decay'");
      }
    }
    if (j.contains("beta")) {
      const auto& s = j.at("beta");
      reject_unknown(s, {"kind", "energy_cap", "h1_scale", "seed", "path"}, "beta.");
      read(s, "kind", cfg.beta_kind);
      read(s, "energy_cap", cfg.beta_energy_cap);
      read(s, "h1_scale", cfg.beta_h1_scale);
      read(s, "seed", cfg.beta_seed);
      read(s, "path", cfg.beta_path);
      if (cfg.beta_kind != "random" && cfg.beta_kind != "file") {
        throw config_error("beta.kind must be 'random' or 'file'");
      }
    }
    if (j.contains("noise")) {
      const auto& s = j.at("noise");
      reject_unknown(s, {"delta", "seed"}, "noise.");
      read(s, "delta", cfg.noise_delta);
      read(s, "seed", cfg.noise_seed);
    }
    if (j.contains("carleman")) {
      const auto& s = j.at("carleman");
      reject_unknown(s, {"rho", "rho0", "c_shift", "lambda_list", "grid"}, "carleman.");
      read(s, "rho", cfg.carleman_rho);
      read(s, "rho0", cfg.carleman_rho0);
      read(s, "c_shift", cfg.carleman_c_shift);
      read(s, "lambda_list", cfg.carleman_lambda_list);
      if (s.contains("grid")) {
        const auto& g = s.at("grid");
        reject_unknown(g, {"n_t", "n_x"}, "carleman.grid.");
        read(g, "n_t", cfg.carleman_n_t);
        read(g, "n_x", cfg.carleman_n_x);
      }
    }
    if (j.contains("inverse")) {
      const auto& s = j.at("inverse");
      reject_unknown(s, {"l_fit", "ridge", "cutoff_policy", "fixed_lambda_cut", "m_budget"},
                     "inverse.");
      read(s, "l_fit", cfg.inverse_l_fit);
      if (s.contains("ridge") && !s.at("ridge").is_null()) {
        cfg.inverse_ridge = s.at("ridge").get<double>();
      }
      read(s, "cutoff_policy", cfg.inverse_cutoff_policy);
      read(s, "fixed_lambda_cut", cfg.inverse_fixed_lambda_cut);
      read(s, "m_budget", cfg.inverse_m_budget);
    }
    if (j.contains("invert")) {
      const auto& s = j.at("invert");
      reject_unknown(s, {"trace_csv", "trace_sidecar"}, "invert.");
      read(s, "trace_csv", cfg.invert_trace_csv);
      read(s, "trace_sidecar", cfg.invert_trace_sidecar);
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      reject_unknown(s, {"deltas", "seed"}, "sweep.");
      read(s, "deltas", cfg.sweep_deltas);
      read(s, "seed", cfg.sweep_seed);
    }
    if (j.contains("observability")) {
      const auto& s = j.at("observability");
      reject_unknown(s, {"sample_size", "energy_cap", "seed"}, "observability.");
      read(s, "sample_size", cfg.observability_sample_size);
      read(s, "energy_cap", cfg.observability_energy_cap);
      read(s, "seed", cfg.observability_seed);
    }
    if (j.contains("check_energy")) {
      const auto& s = j.at("check_energy");
      reject_unknown(s, {"n_pairs", "energy_cap", "seed"}, "check_energy.");
      read(s, "n_pairs", cfg.check_energy_n_pairs);
      read(s, "energy_cap", cfg.check_energy_cap);
      read(s, "seed", cfg.check_energy_seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config value error: ") + e.what());
  }

  cfg.cross_section.validate();
  cfg.kgrid.validate();
  cfg.time.validate();
  cfg.inversion_config(); // validates the policy string
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["cross_section"] = {
      {"a", cfg.cross_section.a},
      {"gamma_side", cfg.cross_section.gamma_side == GammaSide::RightEnd ? "right" : "left"},
      {"l_max", cfg.cross_section.l_max}};
  j["kgrid"] = {{"k_max", cfg.kgrid.k_max}, {"n_k", cfg.kgrid.n_k}};
  j["time"] = {{"T", cfg.time.T}, {"n_t", cfg.time.n_t}};
  j["sigma"] = {{"kind", cfg.sigma_kind}, {"mu", cfg.sigma_mu}};
  j["beta"] = {{"kind", cfg.beta_kind},
               {"energy_cap", cfg.beta_energy_cap},
               {"h1_scale", cfg.beta_h1_scale},
               {"seed", cfg.beta_seed},
               {"path", cfg.beta_path}};
  j["noise"] = {{"delta", cfg.noise_delta}, {"seed", cfg.noise_seed}};
  j["carleman"] = {{"rho", cfg.carleman_rho},
                   {"rho0", cfg.carleman_rho0},
                   {"c_shift", cfg.carleman_c_shift},
                   {"lambda_list", cfg.carleman_lambda_list},
                   {"grid", {{"n_t", cfg.carleman_n_t}, {"n_x", cfg.carleman_n_x}}}};
  j["inverse"] = {{"l_fit", cfg.inverse_l_fit},
                  {"ridge", cfg.inverse_ridge.has_value()
                                ? nlohmann::json(*cfg.inverse_ridge)
                                : nlohmann::json(nullptr)},
                  {"cutoff_policy", cfg.inverse_cutoff_policy},
                  {"fixed_lambda_cut", cfg.inverse_fixed_lambda_cut},
                  {"m_budget", cfg.inverse_m_budget}};
  j["invert"] = {{"trace_csv", cfg.invert_trace_csv},
                 {"trace_sidecar", cfg.invert_trace_sidecar}};
  j["sweep"] = {{"deltas", cfg.sweep_deltas}, {"seed", cfg.sweep_seed}};
  j["observability"] = {{"sample_size", cfg.observability_sample_size},
                        {"energy_cap", cfg.observability_energy_cap},
                        {"seed", cfg.observability_seed}};
  j["check_energy"] = {{"n_pairs", cfg.check_energy_n_pairs},
                       {"energy_cap", cfg.check_energy_cap},
                       {"seed", cfg.check_energy_seed}};
  return j;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw config_error("override must look like key.path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw; // plain string
  }

  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw config_error("empty key segment in override '" + assignment + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

} // namespace heatguide::tools
