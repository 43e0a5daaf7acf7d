#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tdcr/errors.hpp"

namespace tdcr {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Skew-symmetric matrix of a, so that hat(a)*b == a.cross(b).
inline Mat3 hat(const Vec3& a) {
    Mat3 m;
    m <<     0, -a.z(),  a.y(),
         a.z(),      0, -a.x(),
        -a.y(),  a.x(),      0;
    return m;
}

/// Inverse of hat. Requires M skew-symmetric within tol.
inline Vec3 vee(const Mat3& M, double tol = 1e-9) {
    if ((M + M.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("vee: matrix is not skew-symmetric within tolerance");
    return Vec3(M(2, 1), M(0, 2), M(1, 0));
}

inline bool is_rotation(const Mat3& R, double tol = 1e-9) {
    return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
}

/// Nearest rotation to R (polar factor). Newton iteration on X <- (X + X^-T)/2,
/// which is scale-invariant and converges quadratically for det(R) > 0.
inline Mat3 reorthonormalize(const Mat3& R) {
    if (!(R.determinant() > 0))
        throw DegenerateRotationError("reorthonormalize: det(R) <= 0");
    Mat3 X = R;
    for (int i = 0; i < 20; ++i) {
        Mat3 next = 0.5 * (X + X.inverse().transpose());
        double delta = (next - X).cwiseAbs().maxCoeff();
        X = next;
        if (delta < 1e-15) break;
    }
    return X;
}

/// Direct 6x6 solve with partial pivoting. Throws when the condition estimate
/// exceeds 1e12.
inline Vec6 solve6(const Mat6& M, const Vec6& rhs, const char* where = "solve6") {
    Eigen::PartialPivLU<Mat6> lu(M);
    double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw SingularSystemError(rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity(), where);
    return lu.solve(rhs);
}

}  // namespace tdcr
