// Distributed under the MIT License.
// See LICENSE.txt for details.

// Batch driver: report, convergence table, invariant suites.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "adscharge/errors.hpp"
#include "adscharge/pipeline.hpp"

namespace {

using adscharge::RunResult;

int emit(const RunResult& result, const std::string& path) {
  for (const auto& w : result.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  for (const auto& e : result.errors) {
    std::cerr << "error: " << e << "\n";
  }
  if (!result.write) {
    std::cerr << "strict mode: report not written\n";
    return result.exit_code;
  }
  if (path.empty()) {
    std::cout << result.output;
    return result.exit_code;
  }
  std::ofstream out(path, std::ios::binary);
  out << result.output;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return adscharge::exit_code::config_error;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charges, positivity and boundary checks for asymptotically hyperbolic "
               "initial data"};
  app.set_version_flag("--version", adscharge::library_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> degree;
  std::string mutation;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "job file (JSON)");
    if (config_required) {
      c->required();
    }
    sub->add_option("--out", out_path, "output file; stdout when absent");
    sub->add_flag("--strict", strict, "treat every warning as a failure");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--mutation", mutation)->group("");
  };

  auto* report = app.add_subcommand("report", "JSON report of the requested pipelines");
  add_common(report, true);
  report->add_option("--degree", degree, "angular quadrature degree");
  auto* convergence =
      app.add_subcommand("convergence", "CSV table of raw integrals and fitted limits");
  add_common(convergence, true);
  convergence->add_option("--degree", degree, "finest angular degree");
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adscharge::exit_code::config_error;
  }

  try {
    if (verify->parsed()) {
      adscharge::VerifyOptions o;
      if (!config_path.empty()) {
        const adscharge::JobConfig c = adscharge::load_job_config(config_path);
        o.seed = c.seed;
        o.mutation = c.mutation;
      }
      if (seed) {
        o.seed = *seed;
      }
      if (!mutation.empty()) {
        o.mutation = adscharge::parse_mutation(mutation);
      }
      RunResult r = adscharge::run_verify(o);
      // Suite failures are the result itself, not diagnostics.
      r.errors.clear();
      return emit(r, out_path);
    }

    adscharge::JobConfig c = adscharge::load_job_config(config_path);
    if (seed) {
      c.seed = *seed;
    }
    if (degree) {
      c.degree = *degree;
    }
    if (!mutation.empty()) {
      c.mutation = adscharge::parse_mutation(mutation);
    }
    c.validate();
    if (report->parsed()) {
      return emit(adscharge::run_report(c, strict),
                  out_path.empty() ? c.report_path : out_path);
    }
    return emit(adscharge::run_convergence(c, strict),
                out_path.empty() ? c.convergence_path : out_path);
  } catch (const adscharge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return adscharge::exit_code::config_error;
  } catch (const adscharge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return adscharge::exit_code::model_domain_error;
  }
}
