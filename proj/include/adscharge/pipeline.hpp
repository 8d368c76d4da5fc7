// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adscharge/boundary.hpp"
#include "adscharge/charges.hpp"
#include "adscharge/grid_io.hpp"
#include "adscharge/models.hpp"

namespace adscharge {

std::string library_version();

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failure = 1;
inline constexpr int config_error = 2;
inline constexpr int model_domain_error = 3;
inline constexpr int strict_escalation = 4;
}  // namespace exit_code

struct BoundaryDeclaration {
  std::string component = "inner";
  double rho = 0.0;
  std::vector<AdmissibilityMode> modes;
  std::optional<double> yamabe;
  bool round_class = false;
  int degree = -1;
};

/// Every tolerance a run depends on; echoed into each report.
struct Tolerances {
  double divergence_threshold = 1e-6;
  double sigma_margin = 0.5;
  double sigma_max = 8.0;
  int quadrature_check_extra = 4;
  double decay_bound = 1e3;
  double decay_growth = 0.05;
  double dec_absolute = 1e-14;
  double dec_relative = 1e-6;
  double positivity = 1e-6;
  double admissibility = 1e-10;
  double causal = 1e-12;
};

struct JobConfig {
  std::optional<ModelSpec> model;
  std::string grid_path;
  GridOptions grid_options;
  /// Explicit radii; the default model ladder when empty.
  std::vector<double> radii;
  int degree = -1;
  std::vector<int> convergence_degrees;
  std::vector<std::string> pipelines = {"charges", "positivity", "dec"};
  Tolerances tolerances;
  int cone_samples = 100;
  /// DEC sample points per radius (seeded subset of the angular nodes); all
  /// nodes when 0.
  int dec_samples_per_radius = 0;
  std::uint64_t seed = 0;
  std::vector<BoundaryDeclaration> boundary;
  std::string report_path;
  std::string convergence_path;
  std::string grid_export_path;
  /// Test hook: sign flip of one integrand piece.
  IntegrandMutation mutation = IntegrandMutation::None;

  void validate() const;
  bool wants(const std::string& pipeline) const;
};

/// Parses the JSON job file; unknown keys and bad values are ConfigError.
JobConfig parse_job_config(const std::string& json_text);
JobConfig load_job_config(const std::string& path);
/// Normalized echo of the config with every default filled in.
std::string job_config_to_json(const JobConfig& config);

std::string to_string(IntegrandMutation m);
IntegrandMutation parse_mutation(const std::string& name);

/// The data a job describes, at the given angular degree (the config's when
/// negative).
InitialData build_job_data(const JobConfig& config, int degree = -1);

struct RunResult {
  int exit_code = exit_code::ok;
  std::string output;  ///< the report (JSON) or table (CSV)
  bool write = true;   ///< false when --strict suppresses a partial report
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

/// Charges, positivity, cone scan, DEC and boundary verdicts as one JSON
/// report.  Identical config and seed give byte-identical output.
RunResult run_report(const JobConfig& config, bool strict = false);

/// Per-radius and per-degree raw integrals with fitted limits as CSV.
RunResult run_convergence(const JobConfig& config, bool strict = false);

struct VerifyOptions {
  std::uint64_t seed = 0;
  IntegrandMutation mutation = IntegrandMutation::None;
  std::vector<int> clifford_dimensions = {3, 4, 5, 6, 7, 8};
  std::vector<int> dimensions = {3, 4, 5};
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::vector<std::pair<std::string, double>> measurements;
  std::vector<std::string> failures;
};

std::vector<SuiteResult> verify_suites(const VerifyOptions& options);
/// JSON summary of the suites; exit code 1 iff a suite fails.
RunResult run_verify(const VerifyOptions& options);

}  // namespace adscharge
