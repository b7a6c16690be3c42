#pragma once

// Experiment reports: one record per named check plus an environment
// fingerprint. Serialization is byte-stable for a fixed build.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cartan::lab {

/// Upper: pass when the measured value is at most the tolerance. Lower: the
/// measured value (e.g. a detected fault or a fraction of non-flat samples) must
/// reach the tolerance.
enum class Bound { Upper, Lower };

struct CheckRecord {
  std::string name;
  int samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::Upper;
  bool pass = false;
  std::string note;  ///< failure message or context, empty when none
};

struct Report {
  std::string experiment;
  std::string model;
  std::uint64_t seed = 0;
  int sample_count = 0;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json environment;
  bool verdict = false;

  const CheckRecord* find(const std::string& name) const;
};

/// Step sizes, grid parameters and compiler identity.
nlohmann::ordered_json environment_fingerprint();

/// Conjunction of the per-check passes (false for an empty report).
bool conjunction(const std::vector<CheckRecord>& checks);

std::string to_json(const Report& r);
/// One row per check: experiment,model,seed,check,samples,max_error,tolerance,bound,pass.
std::string to_csv(const Report& r);

}  // namespace cartan::lab
