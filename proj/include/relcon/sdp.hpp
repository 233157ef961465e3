#pragma once

#include <map>
#include <string>
#include <vector>

#include "relcon/linalg.hpp"

namespace relcon::sdp {

// Matrix-valued affine function of the decision vector:
//   F(v) = constant + sum_k v_k * coeff[k]
class AffineExpr {
public:
    AffineExpr() = default;
    AffineExpr(Eigen::Index rows, Eigen::Index cols);
    explicit AffineExpr(Matrix constant);

    [[nodiscard]] Eigen::Index rows() const { return constant_.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return constant_.cols(); }
    [[nodiscard]] const Matrix& constant() const { return constant_; }
    [[nodiscard]] const std::map<int, Matrix>& terms() const { return terms_; }

    void add_term(int var, const Matrix& coeff);

    [[nodiscard]] Matrix evaluate(const Vector& v) const;
    [[nodiscard]] AffineExpr transpose() const;

    AffineExpr& operator+=(const AffineExpr& rhs);
    AffineExpr& operator-=(const AffineExpr& rhs);
    AffineExpr& operator*=(double s);

    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
    friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
    friend AffineExpr operator*(const Matrix& lhs, const AffineExpr& a);
    friend AffineExpr operator*(const AffineExpr& a, const Matrix& rhs);

private:
    Matrix constant_;
    std::map<int, Matrix> terms_;
};

// a + a^T
AffineExpr sym(const AffineExpr& a);
// [[a, b], [c, d]] with compatible shapes.
AffineExpr block(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c, const AffineExpr& d);

struct Constraint {
    std::string name;
    AffineExpr expr;  // required: expr >= margin * I
};

struct SolveResult {
    bool converged = false;
    double margin = 0.0;  // optimal t
    Vector x;             // decision vector at the optimum
    int newton_steps = 0;
    std::string message;
};

// Feasibility problem in normalized form: maximize t subject to
// expr_i(v) - t I >= 0 for every registered constraint. Every constraint
// carries the margin, so v = 0 with a sufficiently negative t is always a
// strictly feasible start; callers bound the decision set with normalization
// constraints so the maximal margin is finite.
class LmiSystem {
public:
    // Symmetric n x n variable, n(n+1)/2 scalars.
    AffineExpr symmetric(int n);
    // Diagonal n x n variable, n scalars.
    AffineExpr diagonal(int n);
    // Unstructured rows x cols variable.
    AffineExpr full(int rows, int cols);

    void require_psd(std::string name, const AffineExpr& expr);  // expr >= 0
    void require_nsd(std::string name, const AffineExpr& expr);  // expr <= 0

    [[nodiscard]] int variable_count() const { return vars_; }
    [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }

    // Smallest eigenvalue of each constraint at v, with the sign convention
    // of the PSD form (positive means satisfied).
    [[nodiscard]] std::vector<double> slacks(const Vector& v) const;

    [[nodiscard]] SolveResult maximize_margin(double gap_tolerance = 1e-10,
                                              double margin_cap = 1e6) const;

private:
    int vars_ = 0;
    std::vector<Constraint> constraints_;
};

}  // namespace relcon::sdp
