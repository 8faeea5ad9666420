#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace splinefit {

enum class Family { TruncatedPower, BSpline };
enum class KnotPlacement { Equidistant, Quantile };

std::string_view to_string(Family family);
std::string_view to_string(KnotPlacement placement);

// Interior knots strictly inside the domain [lo, hi].
class KnotVector {
 public:
  KnotVector() = default;
  // Throws DegenerateDomain if lo >= hi and DuplicateKnots if interior is not
  // strictly increasing inside (lo, hi).
  KnotVector(double lo, double hi, std::vector<double> interior);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& interior() const noexcept { return interior_; }
  int interior_count() const noexcept { return static_cast<int>(interior_.size()); }
  bool contains(double z) const noexcept { return z >= lo_ && z <= hi_; }

  // Full B-spline knot sequence: `degree` exterior knots on each side, spaced
  // by the width of the adjacent boundary cell. Strictly increasing.
  std::vector<double> extended(int degree) const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> interior_;
};

KnotVector place_knots(const Eigen::VectorXd& z, int count, KnotPlacement policy);

struct BasisSpec {
  Family family = Family::BSpline;
  int degree = 3;
  KnotVector knots;
  KnotPlacement placement = KnotPlacement::Equidistant;

  // Both families: degree + 1 + interior knot count.
  int dimension() const noexcept { return degree + 1 + knots.interior_count(); }
};

BasisSpec make_basis(Family family, int degree, const Eigen::VectorXd& z, int knot_count,
                     KnotPlacement placement = KnotPlacement::Equidistant);

// [1, z, ..., z^l, (z - k)_+^l ...]; for l = 0 the truncated terms are indicators of z >= k.
Eigen::VectorXd tp_basis(double z, const BasisSpec& spec);

// All degree-l B-splines at z; throws OutOfDomain outside [lo, hi].
Eigen::VectorXd bspline_basis(double z, const BasisSpec& spec);

// First derivative of each degree-l B-spline, through the degree-(l-1) basis.
Eigen::VectorXd bspline_derivative(double z, const BasisSpec& spec);

// f'(z) for f = sum gamma_j B_j, computed from first differences of gamma
// against the degree-(l-1) basis.
double spline_derivative(double z, const Eigen::VectorXd& gamma, const BasisSpec& spec);

// Basis row for either family.
Eigen::VectorXd basis_vector(double z, const BasisSpec& spec);

struct DesignMatrix {
  Eigen::MatrixXd values;
  BasisSpec spec;
};

// Row i is the basis at z_i. B-spline rows outside the domain raise OutOfDomain
// carrying the offending index.
DesignMatrix design_matrix(const Eigen::VectorXd& z, const BasisSpec& spec);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix);

}  // namespace splinefit
