#pragma once

#include <Eigen/Dense>

namespace relcon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix kron(const Matrix& a, const Matrix& b);

// a + a^T
inline Matrix sym(const Matrix& a) { return a + a.transpose(); }

double max_eigenvalue(const Matrix& symmetric);
double min_eigenvalue(const Matrix& symmetric);

// Relative Frobenius asymmetry ||a - a^T|| / max(1, ||a||).
double asymmetry(const Matrix& a);

}  // namespace relcon
