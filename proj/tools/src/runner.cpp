#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>

#include "heatguide/carleman.hpp"
#include "heatguide/json_canonical.hpp"
#include "heatguide/serialization.hpp"
#include "heatguide/version.hpp"

namespace heatguide::tools {

namespace fs = std::filesystem;

OutputWriter::OutputWriter(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw io_error("cannot create output directory '" + dir_ + "': " + ec.message());
}

void OutputWriter::write(const std::string& name, const std::string& content) {
  write_text_file((fs::path(dir_) / name).string(), content);
  files_.push_back(name);
}

namespace {

SourceProfile make_sigma(const ExperimentConfig& cfg, const TimeGrid& tg) {
  if (cfg.sigma_kind == "constant") return SourceProfile::constant_one(tg);
  return SourceProfile::exp_decay(cfg.sigma_mu, tg);
}

SourceProfile make_sigma(const ExperimentConfig& cfg) { return make_sigma(cfg, cfg.time); }

ModalField make_beta(const ExperimentConfig& cfg) {
  if (cfg.beta_kind == "file") {
    if (cfg.beta_path.empty()) throw config_error("beta.kind = file requires beta.path");
    return load_modal_field(cfg.beta_path);
  }
  ModalField f = random_field(cfg.cross_section, cfg.kgrid, cfg.beta_energy_cap, cfg.beta_seed);
  if (f.is_zero()) return f;
  return f.rescaled_to_h1(cfg.beta_h1_scale);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json diagnostics_json(const InversionDiagnostics& diag) {
  nlohmann::json j;
  j["kappa"] = diag.kappa;
  switch (diag.regime) {
    case CutoffRegime::Zero: j["regime"] = "zero"; break;
    case CutoffRegime::Cutoff: j["regime"] = "cutoff"; break;
    case CutoffRegime::Saturated: j["regime"] = "saturated"; break;
  }
  j["lambda_cut"] = diag.lambda_cut;
  j["ridge"] = diag.ridge;
  j["note"] = diag.note;
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : diag.fits) {
    fits.push_back({{"k_index", f.k_index},
                    {"n_modes", f.n_modes},
                    {"condition", std::isfinite(f.condition) ? nlohmann::json(f.condition)
                                                             : nlohmann::json("inf")}});
  }
  j["fits"] = std::move(fits);
  return j;
}

} // namespace

std::string sweep_plot_data(const SweepResult& sweep) {
  std::string out = "# log10_kappa log10_err log10_bound\n";
  for (const auto& r : sweep.records) {
    if (r.saturated || r.kappa <= 0.0 || r.err <= 0.0 || r.bound <= 0.0) continue;
    out += format_double(std::log10(r.kappa)) + " " + format_double(std::log10(r.err)) + " " +
           format_double(std::log10(r.bound)) + "\n";
  }
  return out;
}

void run_forward(const ExperimentConfig& cfg, OutputWriter& out) {
  const SourceProfile sigma = make_sigma(cfg);
  const ModalField beta = make_beta(cfg);
  const ModalTrajectory u = solve_forward(beta, sigma, cfg.time);
  NeumannTrace trace = neumann_trace(u);
  if (cfg.noise_delta > 0.0) trace = add_noise(trace, cfg.noise_delta, cfg.noise_seed);

  out.write("beta.json", to_json(beta));
  out.write("trace.csv", trace_csv(trace));
  out.write("trace.json", trace_sidecar_json(trace));
  out.write("u_final.json", to_json(u.field_at(cfg.time.n_t)));
  const ModalTrajectory v = time_derivative(u, beta, sigma);
  out.write("v_final.json", to_json(v.field_at(cfg.time.n_t)));

  nlohmann::json summary;
  summary["kappa"] = trace_h1_norm(trace);
  summary["beta_l2"] = l2_norm(beta);
  summary["beta_h1"] = h1_norm(beta);
  out.write("forward_summary.json", canonical_json_dump(summary));
}

void run_invert(const ExperimentConfig& cfg, OutputWriter& out) {
  if (cfg.invert_trace_csv.empty()) throw config_error("invert.trace_csv is required");
  const std::string sidecar_path = cfg.invert_trace_sidecar.empty()
                                       ? cfg.invert_trace_csv.substr(0, cfg.invert_trace_csv.rfind('.')) + ".json"
                                       : cfg.invert_trace_sidecar;
  const NeumannTrace trace = load_trace(cfg.invert_trace_csv, sidecar_path);
  // sigma lives on the trace's own grid.
  const SourceProfile sigma = make_sigma(cfg, trace.time_grid());
  const InversionResult res =
      reconstruct_from_trace(trace, cfg.cross_section, sigma, cfg.inversion_config());
  out.write("beta_hat.json", to_json(res.beta_hat));
  out.write("diagnostics.json", canonical_json_dump(diagnostics_json(res.diagnostics)));
}

void run_sweep(const ExperimentConfig& cfg, OutputWriter& out) {
  const SourceProfile sigma = make_sigma(cfg);
  const ModalField beta = make_beta(cfg);
  const SweepResult sweep =
      stability_sweep(beta, cfg.sweep_deltas, sigma, cfg.time, cfg.inversion_config(),
                      cfg.sweep_seed);

  std::string csv = "delta,kappa,err,bound,ratio\n";
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : sweep.records) {
    csv += format_double(r.delta) + "," + format_double(r.kappa) + "," + format_double(r.err) +
           "," + format_double(r.bound) + "," + format_double(r.ratio) + "\n";
    records.push_back({{"delta", r.delta},
                       {"kappa", r.kappa},
                       {"err", r.err},
                       {"bound", r.bound},
                       {"ratio", r.ratio},
                       {"saturated", r.saturated}});
  }
  out.write("sweep.csv", csv);

  nlohmann::json summary;
  summary["c_fit"] = sweep.has_c_fit ? nlohmann::json(sweep.c_fit) : nlohmann::json(nullptr);
  summary["records"] = std::move(records);
  summary["beta_l2"] = l2_norm(beta);
  summary["beta_h1"] = h1_norm(beta);
  out.write("sweep_summary.json", canonical_json_dump(summary));
  out.write("sweep_plot.dat", sweep_plot_data(sweep));
}

void run_carleman(const ExperimentConfig& cfg, OutputWriter& out) {
  WeightParams p;
  p.cs = cfg.cross_section;
  p.c_shift = cfg.carleman_c_shift;
  p.rho = cfg.carleman_rho;
  p.T = cfg.time.T;
  const double l0 = p.lambda0();
  p.lambda = l0;

  const LemmaReport rep = verify_lemma(p, cfg.carleman_n_t, cfg.carleman_n_x, cfg.carleman_rho0);
  auto item = [](const LemmaItemResult& r) {
    return nlohmann::json{{"pass", r.pass},
                          {"constant", r.constant},
                          {"refined_constant", r.refined_constant},
                          {"rel_change", r.rel_change}};
  };
  nlohmann::json lj;
  lj["item_a"] = item(rep.item_a);
  lj["item_b"] = item(rep.item_b);
  lj["item_c"] = item(rep.item_c);
  lj["item_d"] = item(rep.item_d);
  lj["item_e"] = item(rep.item_e);
  lj["alpha_bound"] = rep.alpha_bound;
  lj["ab1_max_rel_err"] = rep.ab1_max_rel_err;
  lj["dt_identity_max_rel_err"] = rep.dt_identity_max_rel_err;
  lj["dtt_identity_max_rel_err"] = rep.dtt_identity_max_rel_err;
  lj["grid"] = {{"n_t", rep.n_t}, {"n_x", rep.n_x}};
  lj["rho"] = rep.rho;
  lj["rho0"] = rep.rho0;
  lj["lambda"] = rep.lambda;
  lj["lambda0"] = l0;
  lj["rho_bounds"] = rep.rho_bounds;
  lj["lambda0_note"] = rep.lambda0_note;
  lj["all_pass"] = rep.all_pass();
  out.write("lemma_report.json", canonical_json_dump(lj));

  std::vector<double> lambdas = cfg.carleman_lambda_list;
  if (lambdas.empty()) lambdas = {l0, 2.0 * l0, 4.0 * l0, 8.0 * l0};
  const auto family = shipped_test_family(cfg.cross_section, cfg.kgrid);
  const ScanTable table = constant_scan(family, cfg.cross_section, cfg.kgrid, cfg.time, p,
                                        lambdas, cfg.carleman_n_x);

  std::string csv = "p,q,m,k_index,lambda,ratio,skipped_fraction\n";
  for (const auto& row : table.rows) {
    csv += std::to_string(row.test.p) + "," + std::to_string(row.test.q) + "," +
           std::to_string(row.test.m) + "," + std::to_string(row.test.k_index) + "," +
           format_double(row.lambda) + "," + format_double(row.ratio) + "," +
           format_double(row.skipped_fraction) + "\n";
  }
  out.write("scan.csv", csv);

  nlohmann::json sj;
  sj["lambdas"] = table.lambdas;
  sj["max_ratio_per_lambda"] = table.max_ratio_per_lambda;
  sj["max_ratio_nondecreasing"] = table.max_ratio_nondecreasing;
  sj["max_ratio_nonincreasing"] = table.max_ratio_nonincreasing;
  sj["family_size"] = family.size();
  out.write("scan_summary.json", canonical_json_dump(sj));
}

void run_observability(const ExperimentConfig& cfg, OutputWriter& out) {
  const double c = empirical_observability_constant(
      cfg.cross_section, cfg.kgrid, cfg.time, cfg.observability_sample_size,
      cfg.observability_energy_cap, cfg.observability_seed);
  nlohmann::json j;
  j["constant"] = c;
  j["sample_size"] = cfg.observability_sample_size;
  j["energy_cap"] = cfg.observability_energy_cap;
  j["seed"] = cfg.observability_seed;
  j["T"] = cfg.time.T;
  j["n_t"] = cfg.time.n_t;
  out.write("observability.json", canonical_json_dump(j));
}

void run_check_energy(const ExperimentConfig& cfg, OutputWriter& out) {
  const SourceProfile sigma = make_sigma(cfg);
  nlohmann::json rows = nlohmann::json::array();
  double worst_es1 = std::numeric_limits<double>::infinity();
  double worst_es2 = worst_es1;
  for (int s = 0; s < cfg.check_energy_n_pairs; ++s) {
    const auto seed = cfg.check_energy_seed + 2 * static_cast<std::uint64_t>(s);
    const ModalField v0 = random_field(cfg.cross_section, cfg.kgrid, cfg.check_energy_cap, seed);
    const ModalField beta =
        random_field(cfg.cross_section, cfg.kgrid, cfg.check_energy_cap, seed + 1);
    const EnergyEstimateReport rep = check_energy_estimates(v0, beta, sigma, cfg.time);
    worst_es1 = std::min(worst_es1, rep.es1_margin);
    worst_es2 = std::min(worst_es2, rep.es2_margin);
    rows.push_back({{"seed", seed},
                    {"es1_margin", rep.es1_margin},
                    {"es1_rhs", rep.es1_rhs},
                    {"es2_margin", rep.es2_margin},
                    {"es2_rhs", rep.es2_rhs}});
  }
  nlohmann::json j;
  j["pairs"] = std::move(rows);
  j["worst_es1_margin"] = worst_es1;
  j["worst_es2_margin"] = worst_es2;
  j["all_nonnegative"] = worst_es1 >= 0.0 && worst_es2 >= 0.0;
  out.write("energy_report.json", canonical_json_dump(j));
}

void run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                    const std::string& out_dir) {
  OutputWriter out(out_dir);
  if (name == "forward") {
    run_forward(cfg, out);
  } else if (name == "invert") {
    run_invert(cfg, out);
  } else if (name == "sweep") {
    run_sweep(cfg, out);
  } else if (name == "carleman") {
    run_carleman(cfg, out);
  } else if (name == "observability") {
    run_observability(cfg, out);
  } else if (name == "check-energy") {
    run_check_energy(cfg, out);
  } else {
    throw config_error("unknown subcommand '" + name + "'");
  }

  nlohmann::json manifest;
  manifest["artifact_version"] = kVersion;
  manifest["subcommand"] = name;
  manifest["config_hash"] = canonical_json_hash(config_to_json(cfg));
  manifest["timestamp_utc"] = utc_timestamp();
  manifest["outputs"] = out.files();
  write_text_file((fs::path(out_dir) / "manifest.json").string(),
                  canonical_json_dump(manifest));
}

} // namespace heatguide::tools
