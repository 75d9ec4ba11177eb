#include "kinefit/rotations.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace kinefit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

// Unit vector orthogonal to a unit vector v, built from a fixed reference so
// the result is deterministic.
Vec3 orthogonal_unit(const Vec3& v) {
    Vec3 ref(1.0, 0.0, 0.0);
    if (std::abs(v.dot(ref)) > 0.9) ref = Vec3(0.0, 1.0, 0.0);
    Vec3 o = ref - v.dot(ref) * v;
    return o.normalized();
}

}  // namespace

Mat3 rotation_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return R;
}

Mat3 rotation_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return R;
}

Mat3 rotation_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return R;
}

bool is_rotation(const Mat3& R, double tol) {
    const Mat3 err = R * R.transpose() - Mat3::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 axis_angle_to_matrix(const AxisAngle& aa) {
    const double norm = aa.axis.norm();
    if (std::abs(norm - 1.0) > kAxisInputTol) {
        throw NonUnitAxis("axis norm " + std::to_string(norm) + " deviates from 1 by more than 1e-6");
    }
    const Vec3 n = aa.axis / norm;
    const double c = std::cos(aa.angle), s = std::sin(aa.angle);
    const double x = n.x(), y = n.y(), z = n.z();
    Mat3 R;
    R << x * x + (y * y + z * z) * c, x * y * (1 - c) - z * s, x * z * (1 - c) + y * s,
         x * y * (1 - c) + z * s, y * y + (x * x + z * z) * c, y * z * (1 - c) - x * s,
         x * z * (1 - c) - y * s, y * z * (1 - c) + x * s, z * z + (x * x + y * y) * c;
    return R;
}

AxisAngle matrix_to_axis_angle(const Mat3& R) {
    const double angle = std::acos(clamp1((R.trace() - 1.0) / 2.0));
    if (angle < 1e-9) {
        return {Vec3(1.0, 0.0, 0.0), 0.0};
    }
    const Vec3 skew(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    if (angle < kPi - 1e-4) {
        return {skew / (2.0 * std::sin(angle)), angle};
    }
    // Near pi the skew part vanishes; recover |n| from the symmetric part
    // n n^T = (S - cos*I) / (1 - cos) and take its best-conditioned column.
    const double c = std::cos(angle);
    const Mat3 outer = ((R + R.transpose()) / 2.0 - c * Mat3::Identity()) / (1.0 - c);
    int pivot = 0;
    outer.diagonal().maxCoeff(&pivot);
    Vec3 n = outer.col(pivot) / std::sqrt(std::max(outer(pivot, pivot), 1e-300));
    n.normalize();
    if (skew.norm() > 1e-12) {
        if (n.dot(skew) < 0.0) n = -n;
    } else {
        // exactly pi: +-n are equivalent, fix a sign deterministically
        int largest = 0;
        n.cwiseAbs().maxCoeff(&largest);
        if (n[largest] < 0.0) n = -n;
    }
    return {n, angle};
}

Mat3 euler_xyz_to_matrix(const EulerXyz& e) {
    return rotation_x(e.x) * rotation_y(e.y) * rotation_z(e.z);
}

EulerXyz matrix_to_euler_xyz(const Mat3& R) {
    // R = Rx * Ry * Rz puts sin(y) at entry (0,2).
    if (std::abs(R(0, 2)) >= 1.0 - kVerifyTol) {
        throw GimbalLock("middle Euler angle at +-pi/2; range-of-motion bounds violated upstream");
    }
    EulerXyz e;
    e.y = std::asin(clamp1(R(0, 2)));
    e.x = std::atan2(-R(1, 2), R(2, 2));
    e.z = std::atan2(-R(0, 1), R(0, 0));
    return e;
}

SolutionSpaceSample solution_space(const Vec3& a, const Vec3& b, double alpha) {
    const double na = a.norm(), nb = b.norm();
    if (na <= 1e-8 || nb <= 1e-8) {
        throw DegenerateDirection("solution_space requires nonzero input directions");
    }
    const Vec3 ah = a / na, bh = b / nb;
    const double d = ah.dot(bh);

    if (d <= -1.0 + 1e-8) {
        // Antiparallel: the bisecting plane degenerates. Any axis orthogonal
        // to a works with angle pi; pick one deterministically.
        return {alpha, orthogonal_unit(ah), kPi};
    }

    Vec3 c_hat, d_hat;
    if (d >= 1.0 - 1e-12) {
        c_hat = ah;
        d_hat = orthogonal_unit(ah);
    } else {
        c_hat = (ah + bh).normalized();
        d_hat = ah.cross(bh).normalized();
    }
    const Vec3 n = std::cos(alpha) * c_hat + std::sin(alpha) * d_hat;

    // Signed angle between the projections of the two directions onto the
    // plane orthogonal to n; the sign makes rotation(n, angle) carry a to b.
    const Vec3 ap = ah - ah.dot(n) * n;
    const Vec3 bp = bh - bh.dot(n) * n;
    const double angle = std::atan2(n.dot(ap.cross(bp)), ap.dot(bp));
    return {alpha, n, angle};
}

double relative_angle(const Mat3& R_a, const Mat3& R_b) {
    return matrix_to_axis_angle(R_a.transpose() * R_b).angle;
}

}  // namespace kinefit
