#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "spikecode/io.hpp"

namespace spikecode {

enum class CriterionStatus { Pass, Fail, Skipped };

struct CriterionResult {
  int id = 0;
  std::string name;
  CriterionStatus status = CriterionStatus::Fail;
  std::string detail;

  bool ok() const { return status != CriterionStatus::Fail; }
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  /// Property checks (3, 4, 5, 11) only, with a small determinism pipeline.
  bool quick = false;
  /// Scratch space for the determinism runs; created when missing.
  std::filesystem::path work_dir = "acceptance";
  /// Called once per finished criterion.
  std::function<void(const CriterionResult&)> on_result;
  /// Progress messages (may be empty).
  std::function<void(const std::string&)> log;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  std::vector<MetricRow> metrics;

  bool all_passed() const;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& options);

/// "[PASS] 3 metric oracles: ..." style line.
std::string format_result(const CriterionResult& result);

/// Writes acceptance.csv (criteria) and acceptance_metrics.csv (numbers).
void write_acceptance(const std::filesystem::path& dir, const AcceptanceReport& report);

}  // namespace spikecode
