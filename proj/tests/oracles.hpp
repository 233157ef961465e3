#pragma once

#include <cmath>
#include <vector>

#include "relcon/linalg.hpp"

namespace oracle {

using relcon::Matrix;

// Scalar agent x' = a x + u with sector [s1, s2] and K = k. Homogeneity fixes
// X = 1, the coupling block only asks for Z > 0, and the synthesis block at
// lambda is, after a Schur complement on its -2Z entry,
//   2a + 2 s2 lambda k + eps + (lambda k + (s1 - s2) z)^2 / (2 z) <= 0.
// Feasibility is decided by scanning z on a log grid.
inline bool scalar_feasible(double a, double k, double s1, double s2, double eps,
                            const std::vector<double>& lambdas) {
    const double d = s1 - s2;
    for (int i = 0; i <= 4000; ++i) {
        const double z = std::pow(10.0, -6.0 + 9.0 * i / 4000.0);
        bool all = true;
        for (double lam : lambdas) {
            const double g = lam * k + d * z;
            if (2.0 * a + 2.0 * s2 * lam * k + eps + g * g / (2.0 * z) > 0.0) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

// Largest k on the grid -10 : 1e-3 : 0 whose whole left neighbourhood down to -10 is feasible.
inline double scalar_boundary(double a, double s1, double s2, double eps, const std::vector<double>& lambdas) {
    double last = std::nan("");
    for (int i = 0; i <= 10000; ++i) {
        const double k = -10.0 + 1e-3 * i;
        if (!scalar_feasible(a, k, s1, s2, eps, lambdas)) break;
        last = k;
    }
    return last;
}

// Synthesis block at lambda for recovered (X, Y, Z), written as "<= 0".
inline Matrix synthesis_block(const Matrix& A, const Matrix& B, const Matrix& S1, const Matrix& S2,
                              double eps, double lam, const Matrix& X, const Matrix& Y, const Matrix& Z) {
    const int n = static_cast<int>(A.rows());
    Matrix blk(2 * n, 2 * n);
    const Matrix tl = A * X + lam * B * Y * S2;
    blk.topLeftCorner(n, n) = tl + tl.transpose() + eps * X;
    blk.topRightCorner(n, n) = lam * B * Y + (S1 - S2) * Z;
    blk.bottomLeftCorner(n, n) = blk.topRightCorner(n, n).transpose();
    blk.bottomRightCorner(n, n) = -2.0 * Z;
    return blk;
}

}  // namespace oracle
