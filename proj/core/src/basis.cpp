#include "splinefit/basis.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "splinefit/dataset.hpp"
#include "splinefit/error.hpp"

namespace splinefit {

namespace {

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

void require_degree(int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
}

void require_family(const BasisSpec& spec, Family family) {
  if (spec.family != family) {
    throw Error(ErrorCode::InvalidArgument,
                "basis family is " + std::string(to_string(spec.family)) + ", expected " +
                    std::string(to_string(family)));
  }
}

void require_domain(const BasisSpec& spec, double z) {
  if (!spec.knots.contains(z)) {
    throw Error(ErrorCode::OutOfDomain, "z = " + format_double(z) + " outside [" +
                                            format_double(spec.knots.lo()) + ", " +
                                            format_double(spec.knots.hi()) + "]");
  }
}

// Index mu with t[mu] <= z < t[mu + 1], restricted to the domain cells; the
// top cell is closed on the right.
int find_span(const std::vector<double>& t, int degree, int interior, double z) {
  const int first = degree;
  const int last = degree + interior;  // t[last + 1] == hi
  if (z >= t[static_cast<std::size_t>(last)]) return last;
  const auto begin = t.begin() + first;
  const auto end = t.begin() + last + 1;
  const auto it = std::upper_bound(begin, end, z);
  return static_cast<int>(it - t.begin()) - 1;
}

// Nonzero degree-p B-splines at z on cell `span`: out[r] = B_{span-p+r, p}(z).
void nonzero_basis(const std::vector<double>& t, int p, int span, double z, double* out) {
  double left[32];
  double right[32];
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = z - t[static_cast<std::size_t>(span + 1 - j)];
    right[j] = t[static_cast<std::size_t>(span + j)] - z;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

constexpr int kMaxDegree = 30;

void require_supported_degree(int degree) {
  if (degree > kMaxDegree) {
    throw Error(ErrorCode::InvalidArgument, "B-spline degree above " + std::to_string(kMaxDegree));
  }
}

// Degree-(p-1) values over the full extended sequence, indexed 0..d.
Eigen::VectorXd lower_degree_basis(const std::vector<double>& t, const BasisSpec& spec, double z) {
  const int p = spec.degree;
  const int d = spec.dimension();
  const int span = find_span(t, p, spec.knots.interior_count(), z);
  double values[kMaxDegree + 1];
  nonzero_basis(t, p - 1, span, z, values);
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(d + 1);
  for (int r = 0; r < p; ++r) lower[span - p + 1 + r] = values[r];
  return lower;
}

void fill_bspline_row(const std::vector<double>& t, const BasisSpec& spec, double z,
                      RowRef row) {
  const int p = spec.degree;
  const int span = find_span(t, p, spec.knots.interior_count(), z);
  double values[kMaxDegree + 1];
  nonzero_basis(t, p, span, z, values);
  row.setZero();
  for (int r = 0; r <= p; ++r) row[span - p + r] = values[r];
}

void fill_tp_row(const BasisSpec& spec, double z, RowRef row) {
  const int p = spec.degree;
  double power = 1.0;
  for (int k = 0; k <= p; ++k) {
    row[k] = power;
    power *= z;
  }
  const auto& interior = spec.knots.interior();
  for (std::size_t j = 0; j < interior.size(); ++j) {
    double value = 0.0;
    if (z >= interior[j]) {
      value = 1.0;
      const double u = z - interior[j];
      for (int k = 0; k < p; ++k) value *= u;
    }
    row[p + 1 + static_cast<Eigen::Index>(j)] = value;
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::TruncatedPower: return "tp";
    case Family::BSpline: return "bspline";
  }
  return "unknown";
}

std::string_view to_string(KnotPlacement placement) {
  switch (placement) {
    case KnotPlacement::Equidistant: return "equidistant";
    case KnotPlacement::Quantile: return "quantile";
  }
  return "unknown";
}

KnotVector::KnotVector(double lo, double hi, std::vector<double> interior)
    : lo_(lo), hi_(hi), interior_(std::move(interior)) {
  if (!(lo_ < hi_)) throw Error(ErrorCode::DegenerateDomain, "knot domain has lo >= hi");
  double prev = lo_;
  for (std::size_t j = 0; j < interior_.size(); ++j) {
    if (!(interior_[j] > prev)) {
      throw Error(ErrorCode::DuplicateKnots, "interior knots must increase strictly inside the domain", j);
    }
    prev = interior_[j];
  }
  if (!interior_.empty() && !(interior_.back() < hi_)) {
    throw Error(ErrorCode::DuplicateKnots, "last interior knot reaches the upper boundary",
                interior_.size() - 1);
  }
}

std::vector<double> KnotVector::extended(int degree) const {
  require_degree(degree);
  const double left_step = (interior_.empty() ? hi_ : interior_.front()) - lo_;
  const double right_step = hi_ - (interior_.empty() ? lo_ : interior_.back());
  std::vector<double> t;
  t.reserve(interior_.size() + 2 + 2 * static_cast<std::size_t>(degree));
  for (int k = degree; k >= 1; --k) t.push_back(lo_ - k * left_step);
  t.push_back(lo_);
  t.insert(t.end(), interior_.begin(), interior_.end());
  t.push_back(hi_);
  for (int k = 1; k <= degree; ++k) t.push_back(hi_ + k * right_step);
  return t;
}

KnotVector place_knots(const Eigen::VectorXd& z, int count, KnotPlacement policy) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "knot count must be non-negative");
  if (z.size() == 0) throw Error(ErrorCode::DegenerateDomain, "no covariate values");
  const double lo = z.minCoeff();
  const double hi = z.maxCoeff();
  if (!(lo < hi)) throw Error(ErrorCode::DegenerateDomain, "covariate has a single distinct value");

  std::vector<double> interior(static_cast<std::size_t>(count));
  if (policy == KnotPlacement::Equidistant) {
    const double step = (hi - lo) / (count + 1);
    for (int j = 1; j <= count; ++j) interior[static_cast<std::size_t>(j - 1)] = lo + j * step;
  } else {
    std::vector<double> distinct(z.data(), z.data() + z.size());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const double m = static_cast<double>(distinct.size() - 1);
    for (int j = 1; j <= count; ++j) {
      const double h = m * j / (count + 1);
      const auto below = static_cast<std::size_t>(h);
      const double frac = h - static_cast<double>(below);
      const double q = below + 1 < distinct.size()
                           ? distinct[below] + frac * (distinct[below + 1] - distinct[below])
                           : distinct[below];
      interior[static_cast<std::size_t>(j - 1)] = q;
    }
  }
  return KnotVector(lo, hi, std::move(interior));
}

BasisSpec make_basis(Family family, int degree, const Eigen::VectorXd& z, int knot_count,
                     KnotPlacement placement) {
  require_degree(degree);
  BasisSpec spec;
  spec.family = family;
  spec.degree = degree;
  spec.knots = place_knots(z, knot_count, placement);
  spec.placement = placement;
  return spec;
}

Eigen::VectorXd tp_basis(double z, const BasisSpec& spec) {
  require_family(spec, Family::TruncatedPower);
  require_degree(spec.degree);
  Eigen::RowVectorXd row(spec.dimension());
  fill_tp_row(spec, z, row);
  return row.transpose();
}

Eigen::VectorXd bspline_basis(double z, const BasisSpec& spec) {
  require_family(spec, Family::BSpline);
  require_degree(spec.degree);
  require_supported_degree(spec.degree);
  require_domain(spec, z);
  const auto t = spec.knots.extended(spec.degree);
  Eigen::RowVectorXd row(spec.dimension());
  fill_bspline_row(t, spec, z, row);
  return row.transpose();
}

Eigen::VectorXd bspline_derivative(double z, const BasisSpec& spec) {
  require_family(spec, Family::BSpline);
  require_supported_degree(spec.degree);
  if (spec.degree < 1) throw Error(ErrorCode::DegreeZero, "derivative of a degree-0 basis");
  require_domain(spec, z);
  const int p = spec.degree;
  const int d = spec.dimension();
  const auto t = spec.knots.extended(p);
  const Eigen::VectorXd lower = lower_degree_basis(t, spec, z);
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double up = lower[i] / (t[ui + p] - t[ui]);
    const double down = lower[i + 1] / (t[ui + p + 1] - t[ui + 1]);
    out[i] = p * (up - down);
  }
  return out;
}

double spline_derivative(double z, const Eigen::VectorXd& gamma, const BasisSpec& spec) {
  require_family(spec, Family::BSpline);
  require_supported_degree(spec.degree);
  if (spec.degree < 1) throw Error(ErrorCode::DegreeZero, "derivative of a degree-0 spline");
  const int d = spec.dimension();
  if (gamma.size() != d) {
    throw Error(ErrorCode::LengthMismatch, "coefficient vector has " + std::to_string(gamma.size()) +
                                               " entries, basis has " + std::to_string(d));
  }
  require_domain(spec, z);
  const int p = spec.degree;
  const auto t = spec.knots.extended(p);
  const Eigen::VectorXd lower = lower_degree_basis(t, spec, z);
  double sum = 0.0;
  for (int j = 1; j < d; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    sum += (gamma[j] - gamma[j - 1]) / (t[uj + p] - t[uj]) * lower[j];
  }
  return p * sum;
}

Eigen::VectorXd basis_vector(double z, const BasisSpec& spec) {
  return spec.family == Family::BSpline ? bspline_basis(z, spec) : tp_basis(z, spec);
}

DesignMatrix design_matrix(const Eigen::VectorXd& z, const BasisSpec& spec) {
  require_degree(spec.degree);
  DesignMatrix out{Eigen::MatrixXd(z.size(), spec.dimension()), spec};
  if (spec.family == Family::BSpline) {
    require_supported_degree(spec.degree);
    const auto t = spec.knots.extended(spec.degree);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (!spec.knots.contains(z[i])) {
        throw Error(ErrorCode::OutOfDomain,
                    "row " + std::to_string(i) + ": z = " + format_double(z[i]) + " outside [" +
                        format_double(spec.knots.lo()) + ", " + format_double(spec.knots.hi()) + "]",
                    static_cast<std::size_t>(i));
      }
      fill_bspline_row(t, spec, z[i], out.values.row(i));
    }
  } else {
    for (Eigen::Index i = 0; i < z.size(); ++i) fill_tp_row(spec, z[i], out.values.row(i));
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& matrix) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
}

}  // namespace splinefit
