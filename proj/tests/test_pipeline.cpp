// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "adscharge/errors.hpp"
#include "adscharge/pipeline.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace adscharge;
using nlohmann::json;

namespace {

const char* kRn = R"({"model":{"family":"rn_ads","n":3,"mbar":0.5,"qbar":0.2},
  "pipelines":["charges","positivity","cone","dec","boundary"],
  "dec":{"samples_per_radius":6}, "cone":{"samples":40}, "seed":5,
  "boundary":{"rho":1.0,"modes":["yamabe_b","ts_b"],"round_class":true}})";

const char* kSlow = R"({"model":{"family":"perturbation","n":3,"tau":1.4,"epsilon":0.05,"seed":2},
  "pipelines":["charges","positivity"]})";

json report_json(const RunResult& r) { return json::parse(r.output); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_job_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"model":{"family":"hyperbolic"},"bogus":1})"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"pipelines":["charges"]})"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"model":{"family":"hyperbolic"},"pipelines":[]})"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"model":{"family":"hyperbolic"},"pipelines":["nope"]})"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"model":{"family":"hyperbolic"},"tolerances":{"positivity":-1}})"), ConfigError);
  CHECK_THROWS_AS(parse_job_config(R"({"model":{"family":"hyperbolic"},"pipelines":["boundary"]})"), ConfigError);
  CHECK_THROWS_AS(load_job_config("/nonexistent/job.json"), ConfigError);
}

TEST_CASE("config echo round trips") {
  const JobConfig c = parse_job_config(kRn);
  const std::string echo = job_config_to_json(c);
  CHECK(job_config_to_json(parse_job_config(echo)) == echo);
}

TEST_CASE("hyperbolic report") {
  const RunResult r = run_report(parse_job_config(
      R"({"model":{"family":"hyperbolic","n":3},"pipelines":["charges","positivity","dec"]})"));
  CHECK(r.exit_code == exit_code::ok);
  const json j = report_json(r);
  CHECK(j["format"] == "adscharge-report");
  CHECK(j["version"] == library_version());
  CHECK(j["clifford_construction"] == clifford_construction_tag());
  CHECK(j["charges"]["m"].get<double>() == 0.0);
  CHECK(std::abs(j["charges"]["Q"].get<double>()) <= 1e-10);
  CHECK(j["dec"]["verdict"] == "pass");
  CHECK(j["config"].contains("tolerances"));
}

TEST_CASE("RN-AdS report: positivity verdict and pinned values") {
  const RunResult r = run_report(parse_job_config(kRn));
  CHECK(r.exit_code == exit_code::ok);
  CHECK(r.warnings.empty());
  const json j = report_json(r);
  CHECK(j["status"] == "ok");
  CHECK(j["charges"]["m_mu"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j["charges"]["Q"].get<double>() == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(j["positivity"]["min_eig"].get<double>() >= -1e-6);
  CHECK(j["positivity"]["mass_dominates_charge"] == true);
  CHECK(j["cone"]["verdict"] == "pass");
  CHECK(j["dec"]["verdict"] == "pass");
  const json& adm = j["boundary"][0]["admissibility"][0];
  CHECK(adm["verdict"] == "pass");
  CHECK(adm["margin"].get<double>() == doctest::Approx(0.0785215657).epsilon(1e-6));
}

TEST_CASE("identical config and seed give identical bytes") {
  const JobConfig c = parse_job_config(kRn);
  CHECK(run_report(c).output == run_report(c).output);
  JobConfig other = c;
  other.seed = 6;
  CHECK(run_report(other).output != run_report(c).output);
}

TEST_CASE("slow decay: decay fail recorded, charges unreliable, strict escalates") {
  JobConfig c = parse_job_config(kSlow);
  const RunResult r = run_report(c);
  CHECK(r.exit_code == exit_code::ok);
  const json j = report_json(r);
  CHECK(j["decay"]["verdict"] == "fail");
  CHECK(j["charges"]["reliable"] == false);
  CHECK(j["status"] == "warnings");
  const RunResult s = run_report(c, true);
  CHECK(s.exit_code == exit_code::strict_escalation);
}

TEST_CASE("model-domain errors") {
  const RunResult r = run_report(parse_job_config(
      R"({"model":{"family":"rn_ads","n":3,"mbar":-1.0}})"));
  CHECK(r.exit_code == exit_code::model_domain_error);
}

TEST_CASE("convergence table: hyperbolic zeros") {
  const RunResult r = run_convergence(parse_job_config(
      R"({"model":{"family":"hyperbolic","n":3},"pipelines":["charges"]})"));
  CHECK(r.exit_code == exit_code::ok);
  const auto rows = csv_rows(r.output);
  REQUIRE(rows.size() > 2);
  CHECK(rows[0][0] == "kind");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k][0] == "fit") CHECK(std::stod(rows[k][6]) == 0.0);
  }
}

TEST_CASE("convergence table: Schwarzschild limit stable across degrees") {
  const RunResult r = run_convergence(parse_job_config(
      R"({"model":{"family":"schwarzschild_ads","n":3,"mbar":0.5},"pipelines":["charges"]})"));
  CHECK(r.warnings.empty());
  int seen = 0;
  for (const auto& row : csv_rows(r.output)) {
    if (row[0] == "stability" && row[2] == "m_(0)") {
      CHECK(std::stod(row[8]) <= 1e-6);
      ++seen;
    }
    if (row[0] == "fit") CHECK(row[10] == "true");
  }
  CHECK(seen == 1);
}

TEST_CASE("ladder changes move the limit by less than the reported uncertainty") {
  auto run = [](const std::string& ladder) {
    const RunResult r = run_report(parse_job_config(
        R"({"model":{"family":"schwarzschild_ads","n":3,"mbar":0.5},"pipelines":["charges"],"ladder":)" +
        ladder + "}"));
    return report_json(r)["charges"];
  };
  const json base = run(R"({"r_min":5,"r_max":11,"count":6})");
  // Doubling the number of radii.
  const json dense = run(R"({"r_min":5,"r_max":11,"count":12})");
  CHECK(std::abs(dense["m_mu"][0].get<double>() - base["m_mu"][0].get<double>()) <=
        dense["max_uncertainty"].get<double>() + base["max_uncertainty"].get<double>());
  // Doubling the outer end runs into the rounding floor of the Cartesian
  // integrand; the uncertainty has to grow with it.
  const json far = run(R"({"r_min":5,"r_max":22,"count":6})");
  CHECK(std::abs(far["m_mu"][0].get<double>() - base["m_mu"][0].get<double>()) <=
        far["max_uncertainty"].get<double>());
  CHECK(far["reliable"] == false);
}

TEST_CASE("verify suites") {
  const RunResult ok = run_verify(VerifyOptions{});
  CHECK(ok.exit_code == exit_code::ok);
  VerifyOptions o;
  o.mutation = IntegrandMutation::FlipU2;
  const auto suites = verify_suites(o);
  for (const SuiteResult& s : suites) {
    CAPTURE(s.name);
    CHECK(s.pass == (s.name != "charges_regression"));
  }
  CHECK(run_verify(o).exit_code == exit_code::verify_failure);
  VerifyOptions odd;
  odd.clifford_dimensions = {7};
  CHECK(verify_suites(odd).front().pass);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADSCHARGE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("exit codes") {
  const std::string rn = write_temp("adscharge_cli_rn.json", kRn);
  const std::string slow = write_temp("adscharge_cli_slow.json", kSlow);
  const std::string bad = write_temp("adscharge_cli_bad.json", R"({"model":{"family":"x"}})");
  const std::string domain =
      write_temp("adscharge_cli_domain.json", R"({"model":{"family":"rn_ads","mbar":-1}})");
  CHECK(run_cli("report --config " + rn) == 0);
  CHECK(run_cli("report --config " + slow) == 0);
  CHECK(run_cli("report --strict --config " + slow) == 4);
  CHECK(run_cli("report --config " + bad) == 2);
  CHECK(run_cli("report --config /nonexistent.json") == 2);
  CHECK(run_cli("report") == 2);
  CHECK(run_cli("report --config " + domain) == 3);
  CHECK(run_cli("verify") == 0);
  CHECK(run_cli("verify --mutation flip_u2") == 1);
}

TEST_CASE("--out, --seed and --degree") {
  const std::string rn = write_temp("adscharge_cli_rn2.json", kRn);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "adscharge_cli_a.json").string();
  const std::string b = (dir / "adscharge_cli_b.json").string();
  const std::string c = (dir / "adscharge_cli_c.json").string();
  REQUIRE(run_cli("report --config " + rn + " --out " + a) == 0);
  REQUIRE(run_cli("report --config " + rn + " --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == run_report(parse_job_config(kRn)).output);
  REQUIRE(run_cli("report --config " + rn + " --seed 9 --degree 12 --out " + c) == 0);
  const json j = json::parse(slurp(c));
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["data"]["angular_degree"] == 12);
  const std::string csv = (dir / "adscharge_cli.csv").string();
  REQUIRE(run_cli("convergence --config " + rn + " --out " + csv) == 0);
  CHECK(slurp(csv).rfind("kind,degree,charge", 0) == 0);
}

}  // TEST_SUITE
