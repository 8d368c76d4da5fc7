// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <algorithm>
#include <cmath>
#include <random>

#include "adscharge/boundary.hpp"
#include "adscharge/clifford.hpp"
#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "adscharge/kids.hpp"
#include "adscharge/pipeline.hpp"
#include "json.hpp"

namespace adscharge {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  /// Records max(value) under `label` and fails when it exceeds the bound.
  void bound(const std::string& label, double value, double limit) {
    auto it = std::find_if(result_.measurements.begin(), result_.measurements.end(),
                           [&](const auto& m) { return m.first == label; });
    if (it == result_.measurements.end()) {
      result_.measurements.emplace_back(label, value);
    } else {
      it->second = std::max(it->second, value);
    }
    if (!(value <= limit)) {
      fail(label + " = " + std::to_string(value) + " exceeds " + std::to_string(limit));
    }
  }

  void check(bool ok, const std::string& what) {
    if (!ok) {
      fail(what);
    }
  }

  void fail(const std::string& what) {
    result_.pass = false;
    if (result_.failures.size() < 20) {
      result_.failures.push_back(what);
    }
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

Spinor random_spinor(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spinor u(d);
  for (int a = 0; a < d; ++a) {
    u(a) = Complex(normal(rng), normal(rng));
  }
  return u / u.norm();
}

Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = normal(rng);
  }
  return v / v.norm();
}

SuiteResult clifford_suite(const VerifyOptions& o) {
  Suite s("clifford");
  for (int n : o.clifford_dimensions) {
    const CliffordRep rep = build_rep(n);
    const CliffordDefects d = clifford_defects(rep);
    s.bound("defects_n" + std::to_string(n), d.max(), 1e-14);
  }
  return s.take();
}

SuiteResult projection_suite(const VerifyOptions& o) {
  Suite s("projections");
  std::mt19937_64 rng(o.seed + 101);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int n : o.clifford_dimensions) {
    const CliffordRep rep = build_rep(n);
    double sum = 0.0, idem = 0.0, orth = 0.0, swap = 0.0, reduced = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec nu = random_unit(n, rng);
      const Spinor phi = random_spinor(rep.dim_spinor, rng);
      const auto [pp, pm] = boundary_projections(rep, nu, phi);
      sum = std::max(sum, (pp + pm - phi).norm());
      idem = std::max(idem, (boundary_projections(rep, nu, pp).first - pp).norm());
      orth = std::max(orth, std::abs(pm.dot(pp)));
      const Spinor gphi = rep.chirality * phi;
      swap = std::max(swap, (rep.chirality * pp -
                             boundary_projections(rep, nu, gphi).second).norm());
      BoundaryPointValues v;
      v.nu = nu;
      v.H = unif(rng);
      v.tr_K = unif(rng);
      v.k_tangential = Vec::Zero(n);
      v.E_nu = 0.0;
      const double lhs = h_endomorphism_form(rep, v, phi);
      const double rhs = (v.H + v.tr_K) * pp.squaredNorm() + (v.H - v.tr_K) * pm.squaredNorm();
      reduced = std::max(reduced, std::abs(lhs - rhs));
    }
    const std::string t = "_n" + std::to_string(n);
    s.bound("partition" + t, sum, 1e-12);
    s.bound("idempotent" + t, idem, 1e-12);
    s.bound("orthogonal" + t, orth, 1e-12);
    s.bound("chirality_swap" + t, swap, 1e-12);
    s.bound("reduced_form" + t, reduced, 1e-12);
  }
  return s.take();
}

SuiteResult kid_suite(const VerifyOptions& o) {
  Suite s("kids");
  for (int n : o.dimensions) {
    const std::string t = "_n" + std::to_string(n);
    const std::vector<Point> pts = kid_sample_points(n, 12, o.seed + 7 + n);
    double basis = 0.0;
    for (int mu = 0; mu <= n; ++mu) {
      basis = std::max(basis, adjoint_kernel_residual(potential_kid(n, mu), pts).max());
    }
    s.bound("potentials" + t, basis, 1e-7);
    double killing = 0.0;
    for (const Kid& k : killing_field_basis(n)) {
      killing = std::max(killing, adjoint_kernel_residual(k, pts).max());
    }
    s.bound("killing_fields" + t, killing, 1e-7);
    s.bound("constant" + t, adjoint_kernel_residual(constant_kid(n), pts).max(), 1e-7);
    const CliffordRep rep = build_rep(n);
    std::mt19937_64 rng(o.seed + 31 * n);
    double spin = 0.0, eks = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Spinor u = random_spinor(rep.dim_spinor, rng);
      spin = std::max(spin, adjoint_kernel_residual(kid_from_spinor(rep, u), pts).max());
      for (int p = 0; p < 3; ++p) {
        const Point x = ball_point(pts[static_cast<std::size_t>(p + 3 * (k % 4))]);
        for (int sign : {+1, -1}) {
          eks = std::max(eks, killing_spinor_residual(rep, u, x, sign));
        }
      }
    }
    s.bound("spinor_kids" + t, spin, 1e-7);
    s.bound("killing_spinor" + t, eks, 1e-6);
  }
  return s.take();
}

double sphere_monomial_integral(const std::vector<int>& alpha) {
  double num = 2.0;
  double total = 0.0;
  for (int a : alpha) {
    if (a % 2 != 0) {
      return 0.0;
    }
    num *= std::tgamma(0.5 * (a + 1));
    total += 0.5 * (a + 1);
  }
  return num / std::tgamma(total);
}

SuiteResult quadrature_suite(const VerifyOptions& o) {
  Suite s("quadrature");
  for (int n : o.dimensions) {
    const SphereRule rule = make_sphere_rule(n, default_sphere_degree(n));
    const double area = sphere_area(n);
    double wsum = 0.0;
    bool positive = true;
    for (double w : rule.weights) {
      wsum += w;
      positive = positive && w > 0.0;
    }
    s.check(positive, "negative quadrature weight for n = " + std::to_string(n));
    s.bound("weight_sum_n" + std::to_string(n), std::abs(wsum - area) / area, 1e-12);
    // Powers per node, then every monomial of degree <= rule.degree.
    const int deg = rule.degree;
    const std::size_t m = rule.size();
    std::vector<double> pw(m * static_cast<std::size_t>(n * (deg + 1)));
    for (std::size_t a = 0; a < m; ++a) {
      for (int i = 0; i < n; ++i) {
        double v = 1.0;
        for (int k = 0; k <= deg; ++k) {
          pw[(a * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) *
                 static_cast<std::size_t>(deg + 1) + static_cast<std::size_t>(k)] = v;
          v *= rule.nodes[a](i);
        }
      }
    }
    double worst = 0.0;
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    std::vector<double> terms(m);
    auto visit = [&](auto&& self, int pos, int left) -> void {
      if (pos == n) {
        for (std::size_t a = 0; a < m; ++a) {
          double v = rule.weights[a];
          for (int i = 0; i < n; ++i) {
            v *= pw[(a * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) *
                        static_cast<std::size_t>(deg + 1) +
                    static_cast<std::size_t>(alpha[static_cast<std::size_t>(i)])];
          }
          terms[a] = v;
        }
        const double q = pairwise_sum(terms);
        worst = std::max(worst, std::abs(q - sphere_monomial_integral(alpha)) / area);
        return;
      }
      for (int p = 0; p <= left; ++p) {
        alpha[static_cast<std::size_t>(pos)] = p;
        self(self, pos + 1, left - p);
      }
      alpha[static_cast<std::size_t>(pos)] = 0;
    };
    visit(visit, 0, deg);
    s.bound("monomials_n" + std::to_string(n), worst, 1e-12);
  }
  return s.take();
}

SuiteResult positivity_suite(const VerifyOptions& o) {
  Suite s("positivity_oracle");
  std::mt19937_64 rng(o.seed + 17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int n : o.dimensions) {
    const CliffordRep rep = build_rep(n);
    double gap = 0.0;
    int disagreements = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec m(n + 1);
      m(0) = 1.5 * unif(rng) + 0.5;
      for (int j = 1; j <= n; ++j) {
        m(j) = unif(rng);
      }
      const double q = unif(rng);
      const PositivityMatrix pm = positivity_matrix(m, q, rep);
      const double closed = positivity_closed_form(m, q);
      gap = std::max(gap, std::abs(pm.min_eig - closed));
      const double mass = std::sqrt(std::abs(eta_inner(m, m)));
      const bool p1 = pm.min_eig >= 0.0;
      const bool p2 = closed >= 0.0;
      const bool p3 = is_causal_future(m) && mass >= std::abs(q);
      disagreements += (p1 != p2 || p2 != p3) ? 1 : 0;
    }
    s.bound("eigenvalue_gap_n" + std::to_string(n), gap, 1e-10);
    s.bound("predicate_disagreements_n" + std::to_string(n), disagreements, 0.0);
  }
  return s.take();
}

ChargeOptions verify_charge_options(const VerifyOptions& o) {
  ChargeOptions c;
  c.mutation = o.mutation;
  return c;
}

SuiteResult linearity_suite(const VerifyOptions& o) {
  Suite s("charges_linearity");
  const int n = 3;
  const ChargeOptions co = verify_charge_options(o);
  {
    const ChargeEvaluator ev(rn_ads_data(n, 0.5, 0.2), co);
    const CliffordRep rep = build_rep(n);
    std::mt19937_64 rng(o.seed + 5);
    const std::vector<Kid> killing = killing_field_basis(n);
    std::vector<std::pair<Kid, Kid>> pairs = {
        {potential_kid(n, 0), potential_kid(n, 2)},
        {potential_kid(n, 1), constant_kid(n)},
        {killing[1], potential_kid(n, 0)},
        {kid_from_spinor(rep, random_spinor(rep.dim_spinor, rng)), constant_kid(n)}};
    double worst = 0.0;
    for (const auto& [k1, k2] : pairs) {
      const double a = 0.7, b = -1.3;
      const double lhs = ev.xi(combine(a, k1, b, k2)).value;
      const double rhs = a * ev.xi(k1).value + b * ev.xi(k2).value;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    s.bound("kid_linearity", worst, 1e-9);
  }
  std::vector<double> ratios;
  for (double q : {0.1, 0.2, 0.4}) {
    ratios.push_back(mass_vector(rn_ads_data(n, 0.5, q), co).Q / q);
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::abs(v.front());
  };
  s.bound("charge_ratio_spread", spread(ratios), 1e-5);
  ratios.clear();
  for (double m : {0.1, 0.5, 1.0}) {
    ratios.push_back(mass_vector(schwarzschild_ads_data(default_model_chart(n), m), co)
                         .m_mu(0) / m);
  }
  s.bound("mass_ratio_spread", spread(ratios), 1e-4);
  return s.take();
}

SuiteResult regression_suite(const VerifyOptions& o) {
  Suite s("charges_regression");
  const int n = 3;
  const ChargeOptions co = verify_charge_options(o);
  // Pinned against the exact values m_0 = mbar, Q = qbar of the model family
  // and -eps / (n 2^{n-1}) for the tangential trace data.
  const ChargeReport rn = mass_vector(rn_ads_data(n, 0.5, 0.2), co);
  s.bound("rn_m0", std::abs(rn.m_mu(0) - 0.5), 1e-6);
  s.bound("rn_Q", std::abs(rn.Q - 0.2), 1e-6);
  s.bound("rn_Q_direct", std::abs(rn.Q_direct - 0.2), 1e-6);
  s.check(rn.reliable, "RN charges flagged unreliable");
  const ChargeReport tt =
      mass_vector(tangential_trace_data(default_model_chart(n), 0.3, 2), co);
  double boost = 0.0;
  for (std::size_t i = 0; i < tt.killing_labels.size(); ++i) {
    if (tt.killing_labels[i] == "boost_02") {
      boost = tt.killing_charges[i];
    }
  }
  s.bound("momentum_boost_02", std::abs(boost - (-0.025)), 1e-6);
  return s.take();
}

}  // namespace

std::vector<SuiteResult> verify_suites(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  for (auto* suite : {&clifford_suite, &projection_suite, &kid_suite, &quadrature_suite,
                      &positivity_suite, &linearity_suite, &regression_suite}) {
    try {
      out.push_back(suite(options));
    } catch (const Error& ex) {
      SuiteResult r;
      r.name = "error";
      r.pass = false;
      r.failures.push_back(ex.what());
      out.push_back(r);
    }
  }
  return out;
}

RunResult run_verify(const VerifyOptions& options) {
  const std::vector<SuiteResult> suites = verify_suites(options);
  nlohmann::ordered_json j;
  j["format"] = "adscharge-verify";
  j["version"] = library_version();
  j["clifford_construction"] = clifford_construction_tag();
  j["seed"] = options.seed;
  j["integrand_mutation"] = to_string(options.mutation);
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  bool all = true;
  RunResult result;
  for (const SuiteResult& s : suites) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["pass"] = s.pass;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.measurements) {
      m[k] = v;
    }
    e["measurements"] = m;
    e["failures"] = s.failures;
    list.push_back(e);
    all = all && s.pass;
    for (const auto& f : s.failures) {
      result.errors.push_back(s.name + ": " + f);
    }
  }
  j["suites"] = list;
  j["pass"] = all;
  result.output = j.dump(2) + "\n";
  result.exit_code = all ? exit_code::ok : exit_code::verify_failure;
  return result;
}

}  // namespace adscharge
