#pragma once

// Acceptance suite: ten numbered checks, each reported on one line as
// "criterion N PASS|FAIL <title>: <detail>".

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace esterr {

#ifdef ESTERR_DATA_DIR
inline const char* kDefaultCalibration = ESTERR_DATA_DIR "/limit_calibration.json";
#else
inline const char* kDefaultCalibration = "data/limit_calibration.json";
#endif

struct AcceptanceOptions {
  unsigned threads = 0;
  /// Artifacts of the individual checks and acceptance.json go here.
  std::filesystem::path out_dir = "acceptance_out";
  std::filesystem::path calibration = kDefaultCalibration;
  /// Criteria to run; empty means all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

/// Observed terminal deviations of the four small-noise rows over the
/// acceptance paths; the acceptance bound is twice these values.
nlohmann::json calibrate_limits(unsigned threads);

}  // namespace esterr
