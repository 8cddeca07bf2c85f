#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikecode/analysis.hpp"
#include "spikecode/classify.hpp"
#include "spikecode/io.hpp"
#include "spikecode/optimizer.hpp"

namespace spikecode {

struct ClassificationSettings {
  int n_classes = 6;
  std::size_t per_class = 84;
  SplitProtocol protocol;
  bool random_weights = false;
};

/// Everything a run needs; serialized as config.json in the run directory.
struct ExperimentConfig {
  std::string name = "run";
  SignalFamily family = SignalFamily::DoubleGauss;
  std::size_t n = 64;
  std::vector<std::uint64_t> seeds{1};
  Budget budget;
  OptimizerOptions optimizer;
  RobustnessGrid robustness;
  std::size_t crosstype_stimuli = 300;
  ClassificationSettings classification;
  /// Figure stages to run (fig2b, fig3, fig4, fig5, fig6); empty runs all,
  /// "none" only optimizes and evaluates.
  std::vector<std::string> figures;
};

inline const std::vector<std::string> kFigureStages{"fig2b", "fig3", "fig4", "fig5", "fig6"};

Json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults.
ExperimentConfig experiment_from_json(const Json& j);

/// Stage failure; what() starts with "[stage] ".
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunSummary {
  std::filesystem::path dir;
  std::vector<MetricRow> metrics;
};

/// Optimizes one network per seed, evaluates it and runs the selected figure
/// stages. Writes config.json, network.json and decoder.json (first seed),
/// seed_<s>/ with per-seed artifacts, metrics.csv and one CSV per figure.
/// Files written before a failing stage are kept.
RunSummary run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// $SPIKECODE_OUT when set, otherwise ./runs.
std::filesystem::path default_output_root();

}  // namespace spikecode
