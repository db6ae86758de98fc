#ifndef HEATGUIDE_TOOLS_RUNNER_HPP
#define HEATGUIDE_TOOLS_RUNNER_HPP

#include <string>
#include <vector>

#include "config.hpp"

namespace heatguide::tools {

/// Collects every artifact written by a run so the manifest can list them
/// all; nothing is written outside of this.
class OutputWriter {
 public:
  explicit OutputWriter(std::string dir);
  /// Write a file under the output directory and record it.
  void write(const std::string& name, const std::string& content);
  const std::vector<std::string>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

void run_forward(const ExperimentConfig& cfg, OutputWriter& out);
void run_invert(const ExperimentConfig& cfg, OutputWriter& out);
void run_sweep(const ExperimentConfig& cfg, OutputWriter& out);
void run_carleman(const ExperimentConfig& cfg, OutputWriter& out);
void run_observability(const ExperimentConfig& cfg, OutputWriter& out);
void run_check_energy(const ExperimentConfig& cfg, OutputWriter& out);

/// Dispatch a subcommand, then write the run manifest (config hash, artifact
/// version, timestamp, output listing). The manifest timestamp is the one
/// deliberately non-reproducible field; every data payload is byte-stable.
void run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                    const std::string& out_dir);

/// gnuplot-ready whitespace-separated columns for a sweep:
/// log10(kappa) log10(err) log10(bound); header-only when no usable rows.
std::string sweep_plot_data(const SweepResult& sweep);

} // namespace heatguide::tools

#endif
