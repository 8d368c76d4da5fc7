// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "adscharge/clifford.hpp"
#include "adscharge/constraints.hpp"
#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "adscharge/kids.hpp"
#include "json.hpp"

#ifndef ADSCHARGE_VERSION
#define ADSCHARGE_VERSION "unknown"
#endif

namespace adscharge {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

std::string library_version() { return ADSCHARGE_VERSION; }

namespace {

const std::set<std::string> kPipelines = {"charges", "positivity", "cone", "dec",
                                          "boundary"};

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

ModelSpec parse_model(const json& j) {
  check_keys(j,
             {"family", "n", "mbar", "qbar", "tau", "epsilon", "seed", "profile",
              "beta", "rate", "enforce_rate"},
             "model");
  ModelSpec m;
  // The decay check reports a claimed rate <= n/2; rejecting it while
  // building the data would hide that diagnostic.
  m.enforce_rate = false;
  read(j, "family", m.family);
  read(j, "n", m.n);
  read(j, "mbar", m.mbar);
  read(j, "qbar", m.qbar);
  read(j, "tau", m.tau);
  read(j, "epsilon", m.epsilon);
  read(j, "seed", m.seed);
  read(j, "profile", m.profile);
  read(j, "beta", m.beta);
  read(j, "rate", m.rate);
  read(j, "enforce_rate", m.enforce_rate);
  return m;
}

ojson model_to_json(const ModelSpec& m) {
  ojson j;
  j["family"] = m.family;
  j["n"] = m.n;
  j["mbar"] = m.mbar;
  j["qbar"] = m.qbar;
  j["tau"] = m.tau;
  j["epsilon"] = m.epsilon;
  j["seed"] = m.seed;
  j["profile"] = m.profile;
  j["beta"] = m.beta;
  j["rate"] = m.rate;
  j["enforce_rate"] = m.enforce_rate;
  return j;
}

ojson tolerances_to_json(const Tolerances& t) {
  ojson j;
  j["divergence_threshold"] = t.divergence_threshold;
  j["sigma_margin"] = t.sigma_margin;
  j["sigma_max"] = t.sigma_max;
  j["quadrature_check_extra"] = t.quadrature_check_extra;
  j["decay_bound"] = t.decay_bound;
  j["decay_growth"] = t.decay_growth;
  j["dec_absolute"] = t.dec_absolute;
  j["dec_relative"] = t.dec_relative;
  j["positivity"] = t.positivity;
  j["admissibility"] = t.admissibility;
  j["causal"] = t.causal;
  return j;
}

ChargeOptions charge_options(const JobConfig& c) {
  ChargeOptions o;
  o.divergence_threshold = c.tolerances.divergence_threshold;
  o.sigma_margin = c.tolerances.sigma_margin;
  o.sigma_max = c.tolerances.sigma_max;
  o.quadrature_check_extra =
      c.grid_path.empty() ? c.tolerances.quadrature_check_extra : 0;
  o.decay.bound = c.tolerances.decay_bound;
  o.decay.growth_tolerance = c.tolerances.decay_growth;
  o.mutation = c.mutation;
  return o;
}

ojson vec_json(const Vec& v) {
  return ojson(std::vector<double>(v.data(), v.data() + v.size()));
}

ojson decay_json(const DecayReport& d) {
  ojson j;
  j["tau"] = d.tau;
  j["verdict"] = to_string(d.verdict);
  j["reason"] = d.reason;
  j["radii"] = d.radii;
  j["metric"] = d.metric;
  j["metric_derivative"] = d.metric_derivative;
  j["extrinsic"] = d.extrinsic;
  j["electric"] = d.electric;
  return j;
}

ojson xi_json(const std::string& label, const XiResult& x) {
  ojson j;
  j["label"] = label;
  j["value"] = x.value;
  j["uncertainty"] = x.uncertainty;
  j["quadrature_error"] = x.quadrature_error;
  j["reliable"] = x.reliable;
  if (!x.warning.empty()) {
    j["warning"] = x.warning;
  }
  j["fit"] = {{"model", x.fit.model},     {"limit", x.fit.limit},
              {"amplitude", x.fit.amplitude}, {"sigma", x.fit.sigma},
              {"residual", x.fit.residual}, {"shift", x.fit.shift},
              {"uncertainty", x.fit.uncertainty}};
  j["raw"] = x.raw;
  j["normalized"] = x.normalized;
  return j;
}

ojson charges_json(const ChargeReport& r) {
  ojson j;
  j["m_mu"] = vec_json(r.m_mu);
  j["m"] = r.m;
  j["causal_class"] = to_string(r.causal_class);
  j["causal_future"] = r.causal_future;
  j["Q"] = r.Q;
  j["Q_direct"] = r.Q_direct;
  ojson k = ojson::object();
  for (std::size_t i = 0; i < r.killing_labels.size(); ++i) {
    k[r.killing_labels[i]] = r.killing_charges[i];
  }
  j["killing_charges"] = k;
  j["sigma"] = r.sigma;
  j["radii"] = r.radii;
  j["max_uncertainty"] = r.max_uncertainty;
  j["reliable"] = r.reliable;
  ojson details = ojson::array();
  for (const NamedCharge& c : r.details) {
    details.push_back(xi_json(c.label, c.result));
  }
  j["details"] = details;
  return j;
}

ojson spinor_json(const Spinor& u) {
  ojson re = ojson::array();
  ojson im = ojson::array();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    re.push_back(u(i).real());
    im.push_back(u(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

ojson optional_json(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::vector<Point> dec_samples(const InitialData& data, const JobConfig& c) {
  std::vector<double> radii = data.chart.radial_nodes;
  if (!c.grid_path.empty()) {
    // Second derivatives of grid fields exist on fewer radii.
    const GridSamples grid = read_grid(c.grid_path);
    const auto layout = make_grid_layout(grid.n, grid.radial_nodes,
                                         grid.angular_nodes, c.grid_options,
                                         grid.angular_degree);
    const std::vector<double> second = differentiable_radii(*layout, 2);
    std::vector<double> keep;
    for (double r : radii) {
      if (std::find(second.begin(), second.end(), r) != second.end()) {
        keep.push_back(r);
      }
    }
    radii = keep;
  }
  const auto& nodes = data.chart.sphere.nodes;
  std::vector<Point> out;
  std::mt19937_64 rng(c.seed);
  for (double r : radii) {
    std::vector<std::size_t> idx(nodes.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      idx[a] = a;
    }
    if (c.dec_samples_per_radius > 0 &&
        static_cast<std::size_t>(c.dec_samples_per_radius) < idx.size()) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(c.dec_samples_per_radius));
      std::sort(idx.begin(), idx.end());
    }
    for (std::size_t a : idx) {
      out.push_back(r * nodes[a]);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(IntegrandMutation m) {
  switch (m) {
    case IntegrandMutation::FlipU1:
      return "flip_u1";
    case IntegrandMutation::FlipU2:
      return "flip_u2";
    case IntegrandMutation::FlipU3:
      return "flip_u3";
    default:
      return "none";
  }
}

IntegrandMutation parse_mutation(const std::string& name) {
  if (name == "none") return IntegrandMutation::None;
  if (name == "flip_u1") return IntegrandMutation::FlipU1;
  if (name == "flip_u2") return IntegrandMutation::FlipU2;
  if (name == "flip_u3") return IntegrandMutation::FlipU3;
  throw ConfigError("unknown integrand mutation \"" + name + "\"");
}

bool JobConfig::wants(const std::string& pipeline) const {
  return std::find(pipelines.begin(), pipelines.end(), pipeline) != pipelines.end();
}

void JobConfig::validate() const {
  if (model.has_value() == !grid_path.empty()) {
    throw ConfigError("config: give exactly one data source (model or grid)");
  }
  if (pipelines.empty()) {
    throw ConfigError("config: at least one pipeline must be requested");
  }
  for (const auto& p : pipelines) {
    if (kPipelines.count(p) == 0) {
      throw ConfigError("config: unknown pipeline \"" + p + "\"");
    }
  }
  const Tolerances& t = tolerances;
  for (double v : {t.divergence_threshold, t.sigma_margin, t.sigma_max, t.decay_bound,
                   t.decay_growth, t.dec_absolute, t.dec_relative, t.positivity,
                   t.admissibility, t.causal}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("config: tolerances must be positive and finite");
    }
  }
  if (t.quadrature_check_extra < 0) {
    throw ConfigError("config: quadrature_check_extra must be non-negative");
  }
  if (degree < -1) {
    throw ConfigError("config: degree must be non-negative (or -1 for the default)");
  }
  for (int d : convergence_degrees) {
    if (d < 0) {
      throw ConfigError("config: convergence degrees must be non-negative");
    }
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw ConfigError("config: radii must be positive and increasing");
    }
  }
  if (cone_samples < 0 || dec_samples_per_radius < 0) {
    throw ConfigError("config: sample counts must be non-negative");
  }
  if (model && (model->n < 3 || model->n > 12)) {
    throw ConfigError("config: model dimension must be between 3 and 12");
  }
  if (wants("boundary") && boundary.empty()) {
    throw ConfigError("config: the boundary pipeline needs a boundary declaration");
  }
  for (const auto& b : boundary) {
    if (!(b.rho > 0.0)) {
      throw ConfigError("config: boundary rho must be positive");
    }
    if (b.modes.empty()) {
      throw ConfigError("config: boundary declaration without modes");
    }
    if (b.yamabe && !(*b.yamabe > 0.0)) {
      throw ConfigError("config: a declared Yamabe invariant must be positive");
    }
  }
}

JobConfig parse_job_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: not valid JSON: ") + ex.what());
  }
  JobConfig c;
  try {
    check_keys(j,
               {"model", "grid", "ladder", "degree", "convergence_degrees",
                "pipelines", "tolerances", "cone", "dec", "seed", "boundary",
                "output", "test_hooks"},
               "config");
    if (j.contains("model")) {
      c.model = parse_model(j.at("model"));
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"path", "one_sided", "angular_fit_degree", "chart_radii"}, "grid");
      c.grid_path = g.at("path").get<std::string>();
      read(g, "one_sided", c.grid_options.one_sided);
      read(g, "angular_fit_degree", c.grid_options.angular_fit_degree);
      read(g, "chart_radii", c.grid_options.chart_radii);
    }
    if (j.contains("ladder") && !(j.at("ladder").is_string() &&
                                  j.at("ladder").get<std::string>() == "default")) {
      const json& l = j.at("ladder");
      check_keys(l, {"radii", "r_min", "r_max", "count"}, "ladder");
      if (l.contains("radii")) {
        c.radii = l.at("radii").get<std::vector<double>>();
      } else {
        c.radii = geometric_ladder(l.at("r_min").get<double>(),
                                   l.at("r_max").get<double>(),
                                   l.at("count").get<int>());
      }
    }
    read(j, "degree", c.degree);
    read(j, "convergence_degrees", c.convergence_degrees);
    read(j, "pipelines", c.pipelines);
    read(j, "seed", c.seed);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      check_keys(t,
                 {"divergence_threshold", "sigma_margin", "sigma_max",
                  "quadrature_check_extra", "decay_bound", "decay_growth",
                  "dec_absolute", "dec_relative", "positivity", "admissibility",
                  "causal"},
                 "tolerances");
      Tolerances& tt = c.tolerances;
      read(t, "divergence_threshold", tt.divergence_threshold);
      read(t, "sigma_margin", tt.sigma_margin);
      read(t, "sigma_max", tt.sigma_max);
      read(t, "quadrature_check_extra", tt.quadrature_check_extra);
      read(t, "decay_bound", tt.decay_bound);
      read(t, "decay_growth", tt.decay_growth);
      read(t, "dec_absolute", tt.dec_absolute);
      read(t, "dec_relative", tt.dec_relative);
      read(t, "positivity", tt.positivity);
      read(t, "admissibility", tt.admissibility);
      read(t, "causal", tt.causal);
    }
    if (j.contains("cone")) {
      check_keys(j.at("cone"), {"samples"}, "cone");
      read(j.at("cone"), "samples", c.cone_samples);
    }
    if (j.contains("dec")) {
      check_keys(j.at("dec"), {"samples_per_radius"}, "dec");
      read(j.at("dec"), "samples_per_radius", c.dec_samples_per_radius);
    }
    if (j.contains("boundary")) {
      json list = j.at("boundary");
      if (list.is_object()) {
        list = json::array({list});
      }
      for (const json& b : list) {
        check_keys(b, {"component", "rho", "mode", "modes", "yamabe", "round_class", "degree"},
                   "boundary");
        BoundaryDeclaration d;
        read(b, "component", d.component);
        d.rho = b.at("rho").get<double>();
        if (b.contains("mode")) {
          d.modes.push_back(parse_admissibility_mode(b.at("mode").get<std::string>()));
        }
        if (b.contains("modes")) {
          for (const auto& m : b.at("modes")) {
            d.modes.push_back(parse_admissibility_mode(m.get<std::string>()));
          }
        }
        if (b.contains("yamabe") && !b.at("yamabe").is_null()) {
          d.yamabe = b.at("yamabe").get<double>();
        }
        read(b, "round_class", d.round_class);
        read(b, "degree", d.degree);
        c.boundary.push_back(d);
      }
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      check_keys(o, {"report", "convergence", "grid"}, "output");
      read(o, "report", c.report_path);
      read(o, "convergence", c.convergence_path);
      read(o, "grid", c.grid_export_path);
    }
    if (j.contains("test_hooks")) {
      check_keys(j.at("test_hooks"), {"integrand_mutation"}, "test_hooks");
      if (j.at("test_hooks").contains("integrand_mutation")) {
        c.mutation = parse_mutation(
            j.at("test_hooks").at("integrand_mutation").get<std::string>());
      }
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: malformed value: ") + ex.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  c.validate();
  return c;
}

JobConfig load_job_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config: cannot read " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_job_config(ss.str());
}

std::string job_config_to_json(const JobConfig& c) {
  ojson j;
  if (c.model) {
    j["model"] = model_to_json(*c.model);
  } else {
    j["grid"] = {{"path", c.grid_path},
                 {"one_sided", c.grid_options.one_sided},
                 {"angular_fit_degree", c.grid_options.angular_fit_degree},
                 {"chart_radii", c.grid_options.chart_radii}};
  }
  if (!c.radii.empty()) {
    j["ladder"] = {{"radii", c.radii}};
  } else {
    j["ladder"] = "default";
  }
  j["degree"] = c.degree;
  j["convergence_degrees"] = c.convergence_degrees;
  j["pipelines"] = c.pipelines;
  j["tolerances"] = tolerances_to_json(c.tolerances);
  j["cone"] = {{"samples", c.cone_samples}};
  j["dec"] = {{"samples_per_radius", c.dec_samples_per_radius}};
  j["seed"] = c.seed;
  ojson b = ojson::array();
  for (const auto& d : c.boundary) {
    ojson modes = ojson::array();
    for (auto m : d.modes) {
      modes.push_back(to_string(m));
    }
    b.push_back({{"component", d.component},
                 {"rho", d.rho},
                 {"modes", modes},
                 {"yamabe", optional_json(d.yamabe)},
                 {"round_class", d.round_class},
                 {"degree", d.degree}});
  }
  j["boundary"] = b;
  if (c.mutation != IntegrandMutation::None) {
    j["test_hooks"] = {{"integrand_mutation", to_string(c.mutation)}};
  }
  return j.dump();
}

InitialData build_job_data(const JobConfig& c, int degree) {
  if (!c.grid_path.empty()) {
    return grid_initial_data(read_grid(c.grid_path), c.grid_options);
  }
  const ModelSpec& m = *c.model;
  const int deg = degree >= 0 ? degree : (c.degree >= 0 ? c.degree : default_sphere_degree(m.n));
  Chart chart = c.radii.empty() ? default_model_chart(m.n, deg)
                                : Chart::make(m.n, c.radii, deg);
  return make_model(m, chart);
}

RunResult run_report(const JobConfig& config, bool strict) {
  config.validate();
  RunResult result;
  ojson rep;
  rep["format"] = "adscharge-report";
  rep["version"] = library_version();
  rep["clifford_construction"] = clifford_construction_tag();
  rep["config"] = ojson::parse(job_config_to_json(config));
  ojson errors = ojson::array();
  auto fail = [&](const std::string& pipeline, const std::string& message) {
    errors.push_back({{"pipeline", pipeline}, {"message", message}});
    result.errors.push_back(pipeline + ": " + message);
  };
  auto warn = [&](const std::string& message) { result.warnings.push_back(message); };

  auto finish = [&]() {
    rep["warnings"] = result.warnings;
    rep["errors"] = errors;
    rep["status"] = !result.errors.empty() ? "errors"
                    : !result.warnings.empty() ? "warnings"
                                               : "ok";
    result.output = rep.dump(2) + "\n";
    if (strict && (!result.warnings.empty() || !result.errors.empty())) {
      if (result.exit_code == exit_code::ok) {
        result.exit_code = exit_code::strict_escalation;
      }
      result.write = result.errors.empty();
    }
    return result;
  };

  InitialData data;
  try {
    data = build_job_data(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& ex) {
    fail("data", ex.what());
    result.exit_code = exit_code::model_domain_error;
    return finish();
  }
  const int n = data.n;
  {
    ojson d;
    d["label"] = data.label;
    d["n"] = n;
    d["tau"] = data.tau;
    d["time_symmetric"] = data.time_symmetric;
    ojson params = ojson::object();
    for (const auto& [k, v] : data.parameters) {
      params[k] = v;
    }
    d["parameters"] = params;
    d["radii"] = data.chart.radial_nodes;
    d["angular_degree"] = data.chart.sphere.degree;
    d["angular_nodes"] = data.chart.sphere.size();
    rep["data"] = d;
  }
  if (!config.grid_export_path.empty()) {
    try {
      write_grid(sample_grid(data), config.grid_export_path);
    } catch (const Error& ex) {
      fail("grid_export", ex.what());
    }
  }

  const CliffordRep crep = build_rep(n);
  std::optional<ChargeReport> charges;
  std::optional<ChargeEvaluator> evaluator;
  if (config.wants("charges") || config.wants("positivity") || config.wants("cone")) {
    try {
      evaluator.emplace(data, charge_options(config));
      charges = mass_vector(*evaluator);
      rep["decay"] = decay_json(charges->decay);
      rep["charges"] = charges_json(*charges);
      for (const auto& w : charges->warnings) {
        warn("charges: " + w);
      }
    } catch (const Error& ex) {
      fail("charges", ex.what());
    }
  }

  if (config.wants("positivity") && charges) {
    try {
      const PositivityMatrix pm = positivity_matrix(charges->m_mu, charges->Q, crep);
      const double closed = positivity_closed_form(charges->m_mu, charges->Q);
      const double tol = config.tolerances.positivity;
      const bool eig_ok = pm.min_eig >= -tol;
      const bool causal_ok =
          is_causal_future(charges->m_mu, config.tolerances.causal + tol) &&
          charges->m + tol >= std::abs(charges->Q);
      ojson p;
      p["min_eig"] = pm.min_eig;
      p["closed_form"] = closed;
      p["eig_closed_form_gap"] = std::abs(pm.min_eig - closed);
      p["tolerance"] = tol;
      p["min_eig_nonnegative"] = eig_ok;
      p["mass_dominates_charge"] = causal_ok;
      p["verdict"] = eig_ok && causal_ok ? "pass" : "fail";
      rep["positivity"] = p;
      if (!eig_ok || !causal_ok) {
        warn("positivity: m_0 < sqrt(|m|^2 + Q^2) beyond tolerance");
      }
    } catch (const Error& ex) {
      fail("positivity", ex.what());
    }
  }

  if (config.wants("cone") && charges) {
    try {
      const ConeScan scan =
          cone_positivity_scan(*evaluator, crep, config.cone_samples, config.seed, &*charges);
      ojson c;
      c["samples"] = scan.samples;
      c["sampled_min"] = scan.sampled_min;
      c["certified_min"] = scan.certified_min;
      c["fit_budget"] = scan.fit_budget;
      c["quadrature_budget"] = scan.quadrature_budget;
      c["budget"] = scan.budget;
      c["worst_direct"] = scan.worst_direct;
      c["certificate_direct"] = scan.certificate_direct;
      c["certificate_u"] = spinor_json(scan.certificate_u);
      c["time_symmetric"] = scan.time_symmetric;
      if (scan.time_symmetric) {
        c["matrix_gap"] = scan.matrix_gap;
        c["worst_gap"] = scan.worst_gap;
      }
      const bool ok = scan.certified_min >= -scan.budget;
      c["verdict"] = ok ? "pass" : "fail";
      rep["cone"] = c;
      if (!ok) {
        warn("cone: the charge form has a negative direction beyond the budget");
      }
    } catch (const Error& ex) {
      fail("cone", ex.what());
    }
  }

  if (config.wants("dec")) {
    try {
      DecOptions o;
      o.tolerance = config.tolerances.dec_absolute;
      o.relative_tolerance = config.tolerances.dec_relative;
      o.samples = dec_samples(data, config);
      const DecReport d = dec_check(data, o);
      ojson j;
      j["verdict"] = to_string(d.verdict);
      j["samples"] = d.samples;
      j["min_margin"] = d.min_margin;
      j["max_margin"] = d.max_margin;
      j["worst_point"] = vec_json(d.worst_point);
      j["worst_scale"] = d.worst_scale;
      j["worst_excess"] = d.worst_excess;
      j["tolerance"] = d.tolerance;
      j["relative_tolerance"] = d.relative_tolerance;
      rep["dec"] = j;
      if (d.verdict == Verdict::Fail) {
        warn("dec: dominant energy condition violated at a sample point");
      }
    } catch (const Error& ex) {
      fail("dec", ex.what());
    }
  }

  if (config.wants("boundary")) {
    ojson list = ojson::array();
    for (const BoundaryDeclaration& decl : config.boundary) {
      ojson b;
      b["component"] = decl.component;
      b["rho"] = decl.rho;
      try {
        BoundaryOptions o;
        o.degree = decl.degree;
        o.yamabe = decl.yamabe;
        o.round_class = decl.round_class;
        o.component = decl.component;
        const BoundaryData bd = level_set_boundary(data, decl.rho, o);
        b["vol"] = bd.vol;
        b["nodes"] = bd.nodes.size();
        b["round_class"] = bd.round_class;
        b["yamabe"] = optional_json(bd.yamabe);
        const Expansions ex = null_expansions(bd);
        b["theta_plus_min"] = *std::min_element(ex.theta_plus.begin(), ex.theta_plus.end());
        b["theta_minus_min"] = *std::min_element(ex.theta_minus.begin(), ex.theta_minus.end());
        b["future_trapped"] = ex.future_trapped;
        b["past_trapped"] = ex.past_trapped;
        const std::vector<double> hm = h_max(bd);
        b["h_max_max"] = *std::max_element(hm.begin(), hm.end());
        if (config.grid_path.empty()) {
          const AreaVariationCheck av = area_variation_check(data, decl.rho, o);
          b["area_variation"] = {{"finite_difference", av.finite_difference},
                                 {"predicted", av.predicted},
                                 {"relative_gap", av.relative_gap}};
        }
        ojson modes = ojson::array();
        for (AdmissibilityMode mode : decl.modes) {
          ojson m;
          m["mode"] = to_string(mode);
          try {
            const AdmissibilityReport a =
                admissibility(bd, mode, config.tolerances.admissibility);
            m["verdict"] = to_string(a.verdict);
            m["margin"] = a.margin;
            m["worst_node"] = a.worst_node;
            m["lhs"] = a.lhs;
            m["rhs"] = a.rhs;
            m["reduced_rhs"] = optional_json(a.reduced_rhs);
            m["reduction_gap"] = optional_json(a.reduction_gap);
            m["dirac_gap"] = optional_json(a.dirac_gap);
          } catch (const Error& ex) {
            m["error"] = ex.what();
            fail("boundary", decl.component + "/" + to_string(mode) + ": " + ex.what());
          }
          modes.push_back(m);
        }
        b["admissibility"] = modes;
      } catch (const Error& ex) {
        b["error"] = ex.what();
        fail("boundary", decl.component + ": " + ex.what());
      }
      list.push_back(b);
    }
    rep["boundary"] = list;
  }
  return finish();
}

RunResult run_convergence(const JobConfig& config, bool strict) {
  config.validate();
  if (!config.model) {
    throw ConfigError("convergence: needs a model source (grid nodes are fixed)");
  }
  const int n = config.model->n;
  std::vector<int> degrees = config.convergence_degrees;
  if (degrees.empty()) {
    const int d = config.degree >= 0 ? config.degree : default_sphere_degree(n);
    degrees = {d, d + 2};
  }
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  if (degrees.size() < 2) {
    throw ConfigError("convergence: needs at least two quadrature degrees");
  }
  RunResult result;
  std::ostringstream csv;
  csv << "kind,degree,charge,radius,raw,normalized,limit,uncertainty,"
         "distance_to_limit,sigma,monotone\n";
  std::vector<std::vector<std::pair<std::string, double>>> limits;
  for (int deg : degrees) {
    InitialData data;
    try {
      data = build_job_data(config, deg);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& ex) {
      result.errors.push_back(std::string("data: ") + ex.what());
      result.exit_code = exit_code::model_domain_error;
      result.output = csv.str();
      return result;
    }
    if (data.chart.radial_nodes.size() < 4) {
      throw ConfigError("convergence: the ladder needs at least four radii");
    }
    const ChargeReport rep = mass_vector(data, charge_options(config));
    std::vector<std::pair<std::string, double>> lim;
    double charge_scale = 0.0;
    for (const NamedCharge& c : rep.details) {
      charge_scale = std::max(charge_scale, std::abs(c.result.value));
    }
    for (const NamedCharge& c : rep.details) {
      const XiResult& x = c.result;
      // The uncertainty is an estimate, not a bound, and the outer samples sit
      // on a roundoff floor relative to the largest charge.
      const double noise = std::max(3.0 * x.uncertainty, 1e-12 * charge_scale);
      bool monotone = true;
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < x.radii.size(); ++k) {
        const double dist = std::abs(x.normalized[k] - x.value);
        csv << "sample," << deg << ',' << c.label << ',' << fmt(x.radii[k]) << ','
            << fmt(x.raw[k]) << ',' << fmt(x.normalized[k]) << ',' << fmt(x.value)
            << ",," << fmt(dist) << ",,\n";
        if (dist > noise && dist > prev) {
          monotone = false;
        }
        prev = std::max(dist, noise);
      }
      csv << "fit," << deg << ',' << c.label << ",,,," << fmt(x.value) << ','
          << fmt(x.uncertainty) << ",," << fmt(rep.sigma) << ','
          << (monotone ? "true" : "false") << '\n';
      if (!monotone) {
        result.warnings.push_back("convergence: " + c.label + " at degree " +
                                  std::to_string(deg) +
                                  " does not approach its limit monotonically");
      }
      lim.emplace_back(c.label, x.value);
    }
    for (const auto& w : rep.warnings) {
      result.warnings.push_back("degree " + std::to_string(deg) + ": " + w);
    }
    limits.push_back(lim);
  }
  // Change of each limit between the two finest degrees.
  const auto& a = limits[limits.size() - 2];
  const auto& b = limits.back();
  for (std::size_t i = 0; i < b.size(); ++i) {
    csv << "stability," << degrees.back() << ',' << b[i].first << ",,,,"
        << fmt(b[i].second) << ",," << fmt(std::abs(b[i].second - a[i].second))
        << ",,\n";
  }
  result.output = csv.str();
  if (strict && !result.warnings.empty()) {
    result.exit_code = exit_code::strict_escalation;
  }
  return result;
}

}  // namespace adscharge
