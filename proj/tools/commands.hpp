#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fpv/expansion.hpp"
#include "fpv/fbm.hpp"
#include "fpv/sde.hpp"

namespace fpv::cli {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

using KeyValues = std::map<std::string, std::string>;

// Plain key=value lines; '#' starts a comment. Model parameters use "param.<name>".
KeyValues read_config_file(const std::string& path);
KeyValues parse_config(std::istream& in, const std::string& origin = "config");

struct ExperimentConfig {
  std::string model = "bounded-tanh";
  ParamMap params;
  int k = 1;
  double hurst = 0.7;
  std::size_t n = 128;
  std::size_t kappa = 8;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double x0 = 0.0;
  FgnMethod method = FgnMethod::circulant;
  double tol = 1e-7;
  std::size_t threads = 0;
  double half_width = 8.0;
  std::size_t points = 10001;
  std::size_t ensemble_paths = 10000;
  std::uint64_t ensemble_seed = 2;
  std::size_t bootstrap = 1000;

  // Throws std::invalid_argument naming the offending key.
  static ExperimentConfig from(const KeyValues& values);
  void validate() const;
  // Full echo for provenance lines.
  KeyValues echo() const;
};

struct ComparisonReport {
  std::size_t samples = 0;
  std::size_t resamples = 0;
  double ks_baseline = 0.0;
  double ks_corrected = 0.0;
  double difference = 0.0;  // corrected - baseline
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool corrected_better = false;  // difference < 0 with the CI excluding 0
};

// KS distances of the sample against the baseline and corrected CDFs, which are
// interpolated linearly on the density rows.
ComparisonReport compare_samples(std::vector<double> samples, const std::vector<DensityRow>& rows,
                                 std::size_t resamples, std::uint64_t seed);

// Z_n samples of the configured experiment, in path order.
std::vector<double> simulate_z(const ExperimentConfig& cfg);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace fpv::cli
