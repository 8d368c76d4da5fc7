// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/grid_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "json.hpp"

namespace adscharge {

namespace {

constexpr const char* kFormat = "adscharge-grid";
constexpr int kVersion = 1;

std::size_t components(int n, int rank) {
  std::size_t c = 1;
  for (int i = 0; i < rank; ++i) {
    c *= static_cast<std::size_t>(n);
  }
  return c;
}

}  // namespace

void GridSamples::validate() const {
  if (n < 3) {
    throw InvalidDimensionError("grid: n must be at least 3");
  }
  const std::size_t nr = radial_nodes.size();
  const std::size_t na = angular_nodes.size();
  if (nr == 0 || na == 0) {
    throw ShapeError("grid: radial and angular nodes are required");
  }
  if (angular_weights.size() != na) {
    throw ShapeError("grid: one angular weight per angular node");
  }
  for (std::size_t k = 0; k < nr; ++k) {
    if (!(radial_nodes[k] > 0.0) || (k > 0 && !(radial_nodes[k] > radial_nodes[k - 1]))) {
      throw DomainError("grid: radial nodes must be positive and increasing");
    }
  }
  for (const Vec& x : angular_nodes) {
    if (x.size() != n || std::abs(x.norm() - 1.0) > 1e-12) {
      throw ShapeError("grid: angular nodes must be unit n-vectors");
    }
  }
  const std::size_t pts = nr * na;
  const std::size_t c2 = components(n, 2);
  if (g.size() != pts * c2 || K.size() != pts * c2 ||
      E.size() != pts * static_cast<std::size_t>(n) ||
      (!e.empty() && e.size() != pts * c2)) {
    throw ShapeError("grid: sample arrays do not match the node counts");
  }
}

GridSamples sample_grid(const InitialData& data) {
  const int n = data.n;
  GridSamples grid;
  grid.n = n;
  grid.tau = data.tau;
  grid.time_symmetric = data.time_symmetric;
  grid.label = data.label;
  grid.radial_nodes = data.chart.radial_nodes;
  grid.angular_nodes = data.chart.sphere.nodes;
  grid.angular_weights = data.chart.sphere.weights;
  grid.angular_degree = data.chart.sphere.degree;
  for (double r : grid.radial_nodes) {
    for (const Vec& xhat : grid.angular_nodes) {
      const Point y = r * xhat;
      const Mat e = data.e->value(y).as_mat();
      const Mat g = background_metric(y) + e;
      const Mat k = data.K->value(y).as_mat();
      const Vec ef = data.E->value(y).as_vec();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          grid.g.push_back(g(i, j));
          grid.e.push_back(e(i, j));
          grid.K.push_back(k(i, j));
        }
        grid.E.push_back(ef(i));
      }
    }
  }
  return grid;
}

std::string grid_to_json(const GridSamples& grid) {
  grid.validate();
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["n"] = grid.n;
  j["tau"] = grid.tau;
  j["time_symmetric"] = grid.time_symmetric;
  j["label"] = grid.label;
  j["radial_nodes"] = grid.radial_nodes;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const Vec& x : grid.angular_nodes) {
    nodes.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  }
  j["angular_nodes"] = nodes;
  j["angular_weights"] = grid.angular_weights;
  j["angular_degree"] = grid.angular_degree;
  j["layout"] = "[radius][angular node][component], components row-major";
  j["g"] = grid.g;
  if (!grid.e.empty()) {
    j["e"] = grid.e;
  }
  j["K"] = grid.K;
  j["E"] = grid.E;
  return j.dump();
}

GridSamples grid_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("grid: not valid JSON: ") + ex.what());
  }
  try {
    if (j.value("format", std::string()) != kFormat) {
      throw ConfigError("grid: missing or unknown format tag");
    }
    if (j.at("version").get<int>() != kVersion) {
      throw ConfigError("grid: unsupported version");
    }
    GridSamples grid;
    grid.n = j.at("n").get<int>();
    grid.tau = j.at("tau").get<double>();
    grid.time_symmetric = j.value("time_symmetric", false);
    grid.label = j.value("label", std::string("grid"));
    grid.radial_nodes = j.at("radial_nodes").get<std::vector<double>>();
    for (const auto& node : j.at("angular_nodes")) {
      const auto v = node.get<std::vector<double>>();
      grid.angular_nodes.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    grid.angular_weights = j.at("angular_weights").get<std::vector<double>>();
    grid.angular_degree = j.value("angular_degree", 0);
    grid.g = j.at("g").get<std::vector<double>>();
    if (j.contains("e")) {
      grid.e = j.at("e").get<std::vector<double>>();
    }
    grid.K = j.at("K").get<std::vector<double>>();
    grid.E = j.at("E").get<std::vector<double>>();
    grid.validate();
    return grid;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("grid: malformed field: ") + ex.what());
  } catch (const Error& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
}

void write_grid(const GridSamples& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("grid: cannot write " + path);
  }
  out << grid_to_json(grid) << '\n';
}

GridSamples read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("grid: cannot read " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return grid_from_json(ss.str());
}

std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs,
                                     int m) {
  const int np = static_cast<int>(xs.size());
  if (m < 0 || np <= m) {
    throw StencilError("fornberg_weights: not enough points for the order");
  }
  Mat c = Mat::Zero(np, m + 1);
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < np; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        }
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      }
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) {
    w[static_cast<std::size_t>(i)] = c(i, m);
  }
  return w;
}

class GridLayout {
 public:
  GridLayout(int n, std::vector<double> radii, std::vector<Vec> nodes,
             const GridOptions& options, int rule_degree)
      : n_(n), radii_(std::move(radii)), nodes_(std::move(nodes)), options_(options) {
    if (radii_.empty() || nodes_.empty()) {
      throw ShapeError("grid layout: empty node set");
    }
    if (options_.angular_fit_degree < 0) {
      if (rule_degree < 0) {
        throw ConfigError("grid layout: angular fit degree unknown without the rule degree");
      }
      options_.angular_fit_degree = rule_degree / 2;
    } else if (rule_degree >= 0 && 2 * options_.angular_fit_degree > rule_degree) {
      throw ConfigError("grid: angular fit degree " +
                        std::to_string(options_.angular_fit_degree) +
                        " exceeds half the angular rule degree " +
                        std::to_string(rule_degree));
    }
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
      lookup_.emplace(key(nodes_[a]), a);
    }
    // Monomials x^alpha with |alpha| <= degree.
    std::vector<int> alpha(static_cast<std::size_t>(n_), 0);
    enumerate(alpha, 0, options_.angular_fit_degree);
    Mat basis(static_cast<Eigen::Index>(nodes_.size()),
              static_cast<Eigen::Index>(exponents_.size()));
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
      for (std::size_t j = 0; j < exponents_.size(); ++j) {
        basis(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) =
            monomial(nodes_[a], exponents_[j]);
      }
    }
    // Monomials are dependent on the sphere; the minimum-norm solution still
    // reproduces every polynomial of the fitted degree.
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(basis);
    cod.setThreshold(1e-11);
    pinv_ = cod.pseudoInverse();
    stencils_.resize(radii_.size());
    const int nr = static_cast<int>(radii_.size());
    for (int k = 0; k < nr; ++k) {
      int lo = k - 2;
      if (lo < 0 || k + 2 >= nr) {
        if (!options_.one_sided || nr < 5) {
          continue;
        }
        lo = std::clamp(lo, 0, nr - 5);
      }
      Stencil s;
      std::vector<double> xs;
      for (int i = lo; i < lo + 5; ++i) {
        s.index.push_back(static_cast<std::size_t>(i));
        xs.push_back(radii_[static_cast<std::size_t>(i)]);
      }
      s.weights = fornberg_weights(radii_[static_cast<std::size_t>(k)], xs, 1);
      stencils_[static_cast<std::size_t>(k)] = std::move(s);
    }
  }

  struct Stencil {
    std::vector<std::size_t> index;
    std::vector<double> weights;
  };

  int n() const { return n_; }
  int fit_degree() const { return options_.angular_fit_degree; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const Mat& pinv() const { return pinv_; }
  const Stencil& stencil(std::size_t k) const { return stencils_[k]; }

  /// (radius index, node index) of a grid point; DomainError otherwise.
  std::pair<std::size_t, std::size_t> locate(const Point& y) const {
    const double r = chart_radius(y);
    const auto it = std::lower_bound(radii_.begin(), radii_.end(), r * (1.0 - 1e-12));
    if (it == radii_.end() || std::abs(*it - r) > 1e-12 * r) {
      throw DomainError("grid field: radius is not a grid radius");
    }
    const auto hit = lookup_.find(key(y / r));
    if (hit == lookup_.end() ||
        (nodes_[hit->second] - y / r).norm() > 1e-10) {
      throw DomainError("grid field: direction is not a grid node");
    }
    return {static_cast<std::size_t>(it - radii_.begin()), hit->second};
  }

  /// Gradient in R^n of the fitted polynomial with coefficients c at x.
  Vec gradient(const Vec& x, const Eigen::Ref<const Vec>& c) const {
    Vec grad = Vec::Zero(n_);
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      const double cj = c(static_cast<Eigen::Index>(j));
      if (cj == 0.0) {
        continue;
      }
      const auto& alpha = exponents_[j];
      for (int l = 0; l < n_; ++l) {
        const int p = alpha[static_cast<std::size_t>(l)];
        if (p == 0) {
          continue;
        }
        double v = p * std::pow(x(l), p - 1);
        for (int m = 0; m < n_; ++m) {
          if (m != l) {
            v *= std::pow(x(m), alpha[static_cast<std::size_t>(m)]);
          }
        }
        grad(l) += cj * v;
      }
    }
    return grad;
  }

 private:
  static std::vector<long long> key(const Vec& x) {
    std::vector<long long> k(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      k[static_cast<std::size_t>(i)] = std::llround(x(i) * 1e8);
    }
    return k;
  }

  static double monomial(const Vec& x, const std::vector<int>& alpha) {
    double v = 1.0;
    for (std::size_t l = 0; l < alpha.size(); ++l) {
      v *= std::pow(x(static_cast<Eigen::Index>(l)), alpha[l]);
    }
    return v;
  }

  void enumerate(std::vector<int>& alpha, std::size_t pos, int left) {
    if (pos == alpha.size()) {
      exponents_.push_back(alpha);
      return;
    }
    for (int p = 0; p <= left; ++p) {
      alpha[pos] = p;
      enumerate(alpha, pos + 1, left - p);
    }
    alpha[pos] = 0;
  }

  int n_;
  std::vector<double> radii_;
  std::vector<Vec> nodes_;
  GridOptions options_;
  std::map<std::vector<long long>, std::size_t> lookup_;
  std::vector<std::vector<int>> exponents_;
  Mat pinv_;
  std::vector<Stencil> stencils_;
};

namespace {

class GridField : public Field {
 public:
  GridField(std::shared_ptr<const GridLayout> layout, int rank, Variance variance,
            std::vector<double> samples)
      : Field(layout->n(), rank, variance),
        layout_(std::move(layout)),
        comps_(components(layout_->n(), rank)),
        samples_(std::move(samples)) {
    const std::size_t nr = layout_->radii().size();
    const std::size_t na = layout_->nodes().size();
    if (samples_.size() != nr * na * comps_) {
      throw ShapeError("grid field: sample count does not match the layout");
    }
    valid_.assign(nr, true);
    coef_.resize(nr);
    for (std::size_t k = 0; k < nr; ++k) {
      Mat f(static_cast<Eigen::Index>(na), static_cast<Eigen::Index>(comps_));
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t c = 0; c < comps_; ++c) {
          const double v = samples_[(k * na + a) * comps_ + c];
          valid_[k] = valid_[k] && std::isfinite(v);
          f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
        }
      }
      if (valid_[k]) {
        coef_[k] = layout_->pinv() * f;
      }
    }
  }

  Tensor value(const Point& y) const override {
    const auto [k, a] = layout_->locate(y);
    if (!valid_[k]) {
      throw StencilError("grid field: no samples at this radius");
    }
    return pack(k, a);
  }

  Tensor derivative(const Point& y) const override {
    const auto [k, a] = layout_->locate(y);
    return derivative_at(k, a);
  }

  bool has_analytic_derivative() const override { return true; }

  FieldPtr derivative_field() const override {
    const std::size_t nr = layout_->radii().size();
    const std::size_t na = layout_->nodes().size();
    const int n = dim();
    std::vector<double> d(nr * na * comps_ * static_cast<std::size_t>(n),
                          std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < nr; ++k) {
      if (!differentiable(k)) {
        continue;
      }
      for (std::size_t a = 0; a < na; ++a) {
        const Tensor t = derivative_at(k, a);
        std::copy(t.data().begin(), t.data().end(),
                  d.begin() + static_cast<std::ptrdiff_t>((k * na + a) * t.size()));
      }
    }
    return std::make_shared<GridField>(layout_, rank() + 1, variance(), std::move(d));
  }

 private:
  bool differentiable(std::size_t k) const {
    const auto& s = layout_->stencil(k);
    if (s.index.empty() || !valid_[k]) {
      return false;
    }
    for (std::size_t i : s.index) {
      if (!valid_[i]) {
        return false;
      }
    }
    return true;
  }

  Tensor pack(std::size_t k, std::size_t a) const {
    const std::size_t na = layout_->nodes().size();
    Tensor t(dim(), rank());
    for (std::size_t c = 0; c < comps_; ++c) {
      t[c] = samples_[(k * na + a) * comps_ + c];
    }
    return t;
  }

  Tensor derivative_at(std::size_t k, std::size_t a) const {
    if (!differentiable(k)) {
      throw StencilError("grid field: no radial stencil at r = " +
                         std::to_string(layout_->radii()[k]));
    }
    const int n = dim();
    const std::size_t na = layout_->nodes().size();
    const auto& s = layout_->stencil(k);
    const Vec& x = layout_->nodes()[a];
    const double r = layout_->radii()[k];
    Tensor out(n, rank() + 1);
    for (std::size_t c = 0; c < comps_; ++c) {
      double dr = 0.0;
      for (std::size_t i = 0; i < s.index.size(); ++i) {
        dr += s.weights[i] * samples_[(s.index[i] * na + a) * comps_ + c];
      }
      Vec grad = layout_->gradient(x, coef_[k].col(static_cast<Eigen::Index>(c)));
      grad -= x.dot(grad) * x;
      for (int l = 0; l < n; ++l) {
        out[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)] =
            x(l) * dr + grad(l) / r;
      }
    }
    return out;
  }

  std::shared_ptr<const GridLayout> layout_;
  std::size_t comps_;
  std::vector<double> samples_;
  std::vector<bool> valid_;
  std::vector<Mat> coef_;
};

}  // namespace

std::shared_ptr<const GridLayout> make_grid_layout(int n,
                                                   std::vector<double> radial_nodes,
                                                   std::vector<Vec> angular_nodes,
                                                   const GridOptions& options,
                                                   int rule_degree) {
  return std::make_shared<const GridLayout>(n, std::move(radial_nodes),
                                            std::move(angular_nodes), options,
                                            rule_degree);
}

int angular_fit_degree(const GridLayout& layout) { return layout.fit_degree(); }

FieldPtr grid_field(std::shared_ptr<const GridLayout> layout, int rank,
                    Variance variance, std::vector<double> samples) {
  return std::make_shared<GridField>(std::move(layout), rank, variance,
                                     std::move(samples));
}

std::vector<double> differentiable_radii(const GridLayout& layout, int order) {
  const std::size_t nr = layout.radii().size();
  std::vector<bool> ok(nr, true);
  for (int o = 0; o < order; ++o) {
    std::vector<bool> next(nr, false);
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& s = layout.stencil(k);
      if (s.index.empty() || !ok[k]) {
        continue;
      }
      bool all = true;
      for (std::size_t i : s.index) {
        all = all && ok[i];
      }
      next[k] = all;
    }
    ok = std::move(next);
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < nr; ++k) {
    if (ok[k]) {
      out.push_back(layout.radii()[k]);
    }
  }
  return out;
}

namespace {

std::vector<double> select_radii(const std::vector<double>& radii, int count) {
  if (count <= 0 || static_cast<std::size_t>(count) >= radii.size()) {
    return radii;
  }
  if (count == 1) {
    return {radii.back()};
  }
  // Nearest available radius to each point of a geometric ladder.
  std::vector<double> out;
  const double lo = std::log(radii.front());
  const double hi = std::log(radii.back());
  std::size_t from = 0;
  for (int i = 0; i < count; ++i) {
    const double target = std::exp(lo + (hi - lo) * i / (count - 1));
    std::size_t best = from;
    for (std::size_t k = from; k < radii.size(); ++k) {
      if (std::abs(radii[k] - target) < std::abs(radii[best] - target)) {
        best = k;
      }
    }
    // Leave room for the remaining picks.
    best = std::min(best, radii.size() - static_cast<std::size_t>(count - i));
    out.push_back(radii[best]);
    from = best + 1;
  }
  return out;
}

}  // namespace

double radial_spacing(const GridLayout& layout) {
  double h = 0.0;
  for (std::size_t k = 1; k < layout.radii().size(); ++k) {
    h = std::max(h, layout.radii()[k] - layout.radii()[k - 1]);
  }
  return h;
}

InitialData grid_initial_data(const GridSamples& grid, const GridOptions& options) {
  grid.validate();
  const int n = grid.n;
  auto layout = make_grid_layout(n, grid.radial_nodes, grid.angular_nodes, options,
                                 grid.angular_degree);
  std::vector<double> e = grid.e;
  if (e.empty()) {
    e = grid.g;
    const std::size_t na = grid.angular_nodes.size();
    const std::size_t c2 = components(n, 2);
    for (std::size_t k = 0; k < grid.radial_nodes.size(); ++k) {
      for (std::size_t a = 0; a < na; ++a) {
        const Mat b = background_metric(grid.radial_nodes[k] * grid.angular_nodes[a]);
        for (std::size_t c = 0; c < c2; ++c) {
          e[(k * na + a) * c2 + c] -= b(static_cast<Eigen::Index>(c) / n,
                                        static_cast<Eigen::Index>(c) % n);
        }
      }
    }
  }
  Chart chart;
  chart.n = n;
  chart.radial_nodes = select_radii(differentiable_radii(*layout, 1),
                                    options.chart_radii);
  chart.sphere.n = n;
  chart.sphere.degree = grid.angular_degree;
  chart.sphere.nodes = grid.angular_nodes;
  chart.sphere.weights = grid.angular_weights;
  if (chart.radial_nodes.empty()) {
    throw StencilError("grid: no radius has a full radial stencil");
  }
  InitialData d = make_initial_data(
      std::move(chart), grid_field(layout, 2, Variance::Covariant, std::move(e)),
      grid_field(layout, 2, Variance::Covariant, grid.K),
      grid_field(layout, 1, Variance::Contravariant, grid.E), grid.tau,
      grid.label.empty() ? "grid" : grid.label);
  d.time_symmetric = grid.time_symmetric;
  d.parameters = {{"grid_radii", static_cast<double>(grid.radial_nodes.size())},
                  {"angular_fit_degree", static_cast<double>(layout->fit_degree())},
                  {"one_sided", options.one_sided ? 1.0 : 0.0},
                  {"radial_spacing", radial_spacing(*layout)}};
  return d;
}

}  // namespace adscharge
