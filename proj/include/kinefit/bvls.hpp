#pragma once

#include <Eigen/Core>

namespace kinefit {

using MatX = Eigen::MatrixXd;

// Bounded-variable least squares: minimize ||A x - b|| subject to
// lo <= x <= hi, by an active-set method in the Lawson-Hanson style. A must
// have full column rank (here it is always a Cholesky factor). The result is
// feasible; on hitting the iteration cap the best feasible iterate is
// returned.
Eigen::VectorXd bvls(const MatX& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace kinefit
