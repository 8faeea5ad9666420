#pragma once

#include <string>

#include <Eigen/Core>

namespace splinefit {

// None: unpenalized. TPRidge: ridge on the truncated-power coefficients only.
// Ridge: ridge on every coefficient (the zeroth-order difference penalty).
// Difference: order-r differences of adjacent coefficients.
enum class PenaltyKind { None, TPRidge, Ridge, Difference };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::None;
  int order = 2;  // Difference only

  static PenaltySpec none() { return {PenaltyKind::None, 0}; }
  static PenaltySpec tp_ridge() { return {PenaltyKind::TPRidge, 0}; }
  // Order 0 is the identity penalty.
  static PenaltySpec difference(int order) {
    return {order == 0 ? PenaltyKind::Ridge : PenaltyKind::Difference, order};
  }
};

std::string describe(const PenaltySpec& spec);

// K together with a root E such that K = E'E; the root feeds the augmented
// least-squares solver.
struct PenaltyMatrix {
  Eigen::MatrixXd values;
  Eigen::MatrixXd root;
};

// diag(0, ..., 0, 1, ..., 1) with degree + 1 leading zeros.
PenaltyMatrix tp_penalty(int d, int degree);

// (d - r) x d matrix of r-th differences; D_0 is the identity.
Eigen::MatrixXd difference_matrix(int d, int r);

// K_r = D_r' D_r.
PenaltyMatrix difference_penalty(int d, int r);

PenaltyMatrix zero_penalty(int d);

PenaltyMatrix build_penalty(const PenaltySpec& spec, int d, int degree);

}  // namespace splinefit
