// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adscharge/field.hpp"
#include "adscharge/initial_data.hpp"

namespace adscharge {

/// Samples of (g, K, E) on radial nodes x angular nodes.  Component arrays
/// are flattened as [radius][angular node][component], components row-major.
/// The deviation e = g - b is stored next to g because forming g - b from g
/// far out cancels almost every digit.
struct GridSamples {
  int n = 0;
  double tau = 0.0;
  bool time_symmetric = false;
  std::string label;
  std::vector<double> radial_nodes;
  std::vector<Vec> angular_nodes;
  std::vector<double> angular_weights;
  int angular_degree = 0;
  std::vector<double> g;
  std::vector<double> e;  ///< empty when only g is known
  std::vector<double> K;
  std::vector<double> E;
  void validate() const;
};

GridSamples sample_grid(const InitialData& data);

std::string grid_to_json(const GridSamples& grid);
GridSamples grid_from_json(const std::string& text);
void write_grid(const GridSamples& grid, const std::string& path);
GridSamples read_grid(const std::string& path);

struct GridOptions {
  /// Allow one-sided radial stencils at the ends of the ladder.
  bool one_sided = false;
  /// Degree of the polynomial in xhat fitted on each sphere for angular
  /// derivatives.  The fit only reproduces polynomials of degree d when the
  /// angular rule integrates degree 2d exactly (with 11 azimuthal points a
  /// degree-6 fit already aliases), so the default -1 means half the rule
  /// degree and larger requests are rejected.
  int angular_fit_degree = -1;
  /// Number of radii handed to the chart, spread geometrically over the
  /// differentiable ones; all of them when 0.  Fine radial sampling is needed
  /// for the stencils but the charge fits only need a short ladder.
  int chart_radii = 0;
};

/// Node layout shared by the fields of one grid.
class GridLayout;

/// A field known only at grid nodes.  Radial derivatives use five-point
/// Fornberg weights on the (possibly uneven) ladder, angular derivatives the
/// tangential gradient of the fitted polynomial.  Evaluation off the grid is a
/// domain error; a radius without a full stencil is a stencil error.
FieldPtr grid_field(std::shared_ptr<const GridLayout> layout, int rank,
                    Variance variance, std::vector<double> samples);

/// `rule_degree` is the exactness degree of the angular nodes; required
/// unless the options fix the fit degree.
std::shared_ptr<const GridLayout> make_grid_layout(
    int n, std::vector<double> radial_nodes, std::vector<Vec> angular_nodes,
    const GridOptions& options = {}, int rule_degree = -1);

/// The angular fit degree the layout uses.
int angular_fit_degree(const GridLayout& layout);

/// Largest gap between neighbouring radii, the h of the O(h^4) radial error.
double radial_spacing(const GridLayout& layout);

/// Radii at which fields of the layout have first (order 1) or second
/// (order 2) derivatives.
std::vector<double> differentiable_radii(const GridLayout& layout, int order);

/// Initial data backed by the samples.  The chart keeps (a selection of) the
/// radii where first derivatives exist.
InitialData grid_initial_data(const GridSamples& grid,
                              const GridOptions& options = {});

/// Weights of the derivative of order m at x0 from values at the points xs.
std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs,
                                     int m);

}  // namespace adscharge
