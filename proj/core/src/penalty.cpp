#include "splinefit/penalty.hpp"

#include "splinefit/error.hpp"

namespace splinefit {

std::string describe(const PenaltySpec& spec) {
  switch (spec.kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::TPRidge: return "tp-ridge";
    case PenaltyKind::Ridge: return "difference-0";
    case PenaltyKind::Difference: return "difference-" + std::to_string(spec.order);
  }
  return "unknown";
}

PenaltyMatrix tp_penalty(int d, int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be non-negative");
  if (d <= degree + 1) {
    throw Error(ErrorCode::DimensionTooSmall, "tp penalty needs d > degree + 1 (d = " + std::to_string(d) +
                                                  ", degree = " + std::to_string(degree) + ")");
  }
  const int penalized = d - degree - 1;
  PenaltyMatrix k;
  k.values = Eigen::MatrixXd::Zero(d, d);
  k.root = Eigen::MatrixXd::Zero(penalized, d);
  for (int j = 0; j < penalized; ++j) {
    k.values(degree + 1 + j, degree + 1 + j) = 1.0;
    k.root(j, degree + 1 + j) = 1.0;
  }
  return k;
}

Eigen::MatrixXd difference_matrix(int d, int r) {
  if (d < 1 || r < 0) throw Error(ErrorCode::InvalidArgument, "difference matrix needs d >= 1 and r >= 0");
  if (r >= d) {
    throw Error(ErrorCode::OrderTooLarge, "difference order " + std::to_string(r) +
                                              " must be below the dimension " + std::to_string(d));
  }
  Eigen::MatrixXd dr = Eigen::MatrixXd::Identity(d, d);
  for (int k = 1; k <= r; ++k) {
    // D_1 of size (d - k) x (d - k + 1) applied to D_{k-1}.
    const Eigen::Index rows = d - k;
    Eigen::MatrixXd next(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i) next.row(i) = dr.row(i + 1) - dr.row(i);
    dr = std::move(next);
  }
  return dr;
}

PenaltyMatrix difference_penalty(int d, int r) {
  PenaltyMatrix k;
  k.root = difference_matrix(d, r);
  k.values = k.root.transpose() * k.root;
  return k;
}

PenaltyMatrix zero_penalty(int d) {
  return {Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(0, d)};
}

PenaltyMatrix build_penalty(const PenaltySpec& spec, int d, int degree) {
  switch (spec.kind) {
    case PenaltyKind::None: return zero_penalty(d);
    case PenaltyKind::TPRidge: return tp_penalty(d, degree);
    case PenaltyKind::Ridge: return difference_penalty(d, 0);
    case PenaltyKind::Difference:
      if (spec.order < 1) throw Error(ErrorCode::InvalidArgument, "difference order must be at least 1");
      return difference_penalty(d, spec.order);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown penalty kind");
}

}  // namespace splinefit
