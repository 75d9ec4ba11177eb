#pragma once

#include <Eigen/Core>

#include "kinefit/errors.hpp"

namespace kinefit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Tolerances. Inputs are accepted up to kAxisInputTol; derived quantities are
// verified against kVerifyTol in tests and internal checks.
inline constexpr double kAxisInputTol = 1e-6;
inline constexpr double kVerifyTol = 1e-9;
inline constexpr double kRoundTripTol = 1e-8;

// Rotation by `angle` radians about a unit axis.
struct AxisAngle {
    Vec3 axis{1.0, 0.0, 0.0};
    double angle{0.0};
};

// Sequential intrinsic rotations about the local X, Y and Z axes.
struct EulerXyz {
    double x{0.0};
    double y{0.0};
    double z{0.0};
};

// One point of the axis-angle family mapping a direction a onto a direction b.
// `alpha` selects the axis within the plane that symmetrically bisects the two
// directions; `angle` is the rotation about that axis carrying a onto b.
struct SolutionSpaceSample {
    double alpha{0.0};
    Vec3 axis{1.0, 0.0, 0.0};
    double angle{0.0};
};

Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_z(double angle);

// Orthonormality + det(R)=1 within tol per entry.
bool is_rotation(const Mat3& R, double tol = kVerifyTol);

// Rodrigues form. The axis is renormalized when within kAxisInputTol of unit
// length; larger deviations raise NonUnitAxis.
Mat3 axis_angle_to_matrix(const AxisAngle& aa);

// Inverse of the above; angle in [0, pi]. The zero rotation returns the
// conventional axis (1,0,0).
AxisAngle matrix_to_axis_angle(const Mat3& R);

Mat3 euler_xyz_to_matrix(const EulerXyz& e);

// Raises GimbalLock when the middle angle reaches +-pi/2 within kVerifyTol,
// which signals a range-of-motion violation upstream.
EulerXyz matrix_to_euler_xyz(const Mat3& R);

// The axis-angle family for mapping direction a onto direction b, sampled at
// plane angle alpha in [-pi, pi]. Antiparallel inputs take a dedicated branch
// (fixed axis orthogonal to a, angle pi). Raises DegenerateDirection when
// either input has vanishing norm.
SolutionSpaceSample solution_space(const Vec3& a, const Vec3& b, double alpha);

// Screw angle of R_a^T * R_b, in [0, pi]. Symmetric in its arguments.
double relative_angle(const Mat3& R_a, const Mat3& R_b);

}  // namespace kinefit
