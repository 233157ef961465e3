#include "relcon/sdp.hpp"

#include <cmath>
#include <limits>

#include "relcon/error.hpp"

namespace relcon::sdp {

AffineExpr::AffineExpr(Eigen::Index rows, Eigen::Index cols) : constant_(Matrix::Zero(rows, cols)) {}

AffineExpr::AffineExpr(Matrix constant) : constant_(std::move(constant)) {}

void AffineExpr::add_term(int var, const Matrix& coeff) {
    auto [it, inserted] = terms_.try_emplace(var, coeff);
    if (!inserted) it->second += coeff;
}

Matrix AffineExpr::evaluate(const Vector& v) const {
    Matrix out = constant_;
    for (const auto& [k, c] : terms_) out += v(k) * c;
    return out;
}

AffineExpr AffineExpr::transpose() const {
    AffineExpr out(Matrix(constant_.transpose()));
    for (const auto& [k, c] : terms_) out.terms_.emplace(k, c.transpose());
    return out;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& rhs) {
    if (constant_.size() == 0 && terms_.empty()) {
        return *this = rhs;
    }
    if (rhs.rows() != rows() || rhs.cols() != cols()) {
        throw Error(ErrorCode::DimensionMismatch, "affine expression shapes differ");
    }
    constant_ += rhs.constant_;
    for (const auto& [k, c] : rhs.terms_) add_term(k, c);
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& rhs) { return *this += -1.0 * rhs; }

AffineExpr& AffineExpr::operator*=(double s) {
    constant_ *= s;
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

AffineExpr operator*(const Matrix& lhs, const AffineExpr& a) {
    if (lhs.cols() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "left factor shape");
    AffineExpr out(Matrix(lhs * a.constant_));
    for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, lhs * c);
    return out;
}

AffineExpr operator*(const AffineExpr& a, const Matrix& rhs) {
    if (a.cols() != rhs.rows()) throw Error(ErrorCode::DimensionMismatch, "right factor shape");
    AffineExpr out(Matrix(a.constant_ * rhs));
    for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, c * rhs);
    return out;
}

AffineExpr sym(const AffineExpr& a) { return a + a.transpose(); }

AffineExpr block(const AffineExpr& a, const AffineExpr& b, const AffineExpr& c, const AffineExpr& d) {
    if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "block expression shapes do not tile");
    }
    const auto r0 = a.rows(), c0 = a.cols();
    const auto rows = a.rows() + c.rows(), cols = a.cols() + b.cols();
    auto place = [&](AffineExpr& out, const AffineExpr& part, Eigen::Index r, Eigen::Index col) {
        Matrix cm = Matrix::Zero(rows, cols);
        cm.block(r, col, part.rows(), part.cols()) = part.constant();
        out += AffineExpr(cm);
        for (const auto& [k, coeff] : part.terms()) {
            Matrix m = Matrix::Zero(rows, cols);
            m.block(r, col, part.rows(), part.cols()) = coeff;
            out.add_term(k, m);
        }
    };
    AffineExpr out(rows, cols);
    place(out, a, 0, 0);
    place(out, b, 0, c0);
    place(out, c, r0, 0);
    place(out, d, r0, c0);
    return out;
}

AffineExpr LmiSystem::symmetric(int n) {
    AffineExpr out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            out.add_term(vars_++, e);
        }
    }
    return out;
}

AffineExpr LmiSystem::diagonal(int n) {
    AffineExpr out(n, n);
    for (int i = 0; i < n; ++i) {
        Matrix e = Matrix::Zero(n, n);
        e(i, i) = 1.0;
        out.add_term(vars_++, e);
    }
    return out;
}

AffineExpr LmiSystem::full(int rows, int cols) {
    AffineExpr out(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            Matrix e = Matrix::Zero(rows, cols);
            e(i, j) = 1.0;
            out.add_term(vars_++, e);
        }
    }
    return out;
}

void LmiSystem::require_psd(std::string name, const AffineExpr& expr) {
    if (expr.rows() != expr.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "constraint " + name + " is not square");
    }
    // Symmetrize so that round-off in the assembly never leaks into the barrier.
    AffineExpr symmetric_expr = 0.5 * sym(expr);
    constraints_.push_back({std::move(name), std::move(symmetric_expr)});
}

void LmiSystem::require_nsd(std::string name, const AffineExpr& expr) {
    require_psd(std::move(name), -expr);
}

std::vector<double> LmiSystem::slacks(const Vector& v) const {
    std::vector<double> out;
    out.reserve(constraints_.size());
    for (const auto& c : constraints_) out.push_back(min_eigenvalue(c.expr.evaluate(v)));
    return out;
}

namespace {

struct BarrierState {
    double value = 0.0;  // -sum log det S_i - log(cap - t)
    Vector gradient;
    Matrix hessian;
};

// Returns false when some slack matrix is not positive definite.
bool barrier_value(const std::vector<Constraint>& cons, const Vector& xi, double cap, double& value) {
    const auto t_index = xi.size() - 1;
    const double t = xi(t_index);
    if (!(cap - t > 0.0)) return false;
    value = -std::log(cap - t);
    for (const auto& c : cons) {
        Matrix s = c.expr.evaluate(xi.head(t_index));
        s.diagonal().array() -= t;
        Eigen::LLT<Matrix> llt(s);
        if (llt.info() != Eigen::Success) return false;
        const Vector d = llt.matrixL().toDenseMatrix().diagonal();
        if ((d.array() <= 0.0).any() || !d.allFinite()) return false;
        value -= 2.0 * d.array().log().sum();
    }
    return std::isfinite(value);
}

BarrierState barrier_derivatives(const std::vector<Constraint>& cons, const Vector& xi, double cap) {
    const auto dim = xi.size();
    const auto t_index = dim - 1;
    BarrierState st;
    st.gradient = Vector::Zero(dim);
    st.hessian = Matrix::Zero(dim, dim);
    const double slack_t = cap - xi(t_index);
    st.gradient(t_index) += 1.0 / slack_t;
    st.hessian(t_index, t_index) += 1.0 / (slack_t * slack_t);

    std::vector<std::pair<Eigen::Index, Matrix>> m;
    for (const auto& c : cons) {
        Matrix s = c.expr.evaluate(xi.head(t_index));
        s.diagonal().array() -= xi(t_index);
        Eigen::LLT<Matrix> llt(s);
        const Matrix sinv = llt.solve(Matrix::Identity(s.rows(), s.cols()));
        m.clear();
        for (const auto& [k, coeff] : c.expr.terms()) m.emplace_back(k, sinv * coeff);
        m.emplace_back(t_index, -sinv);
        for (std::size_t a = 0; a < m.size(); ++a) {
            st.gradient(m[a].first) -= m[a].second.trace();
            for (std::size_t b = a; b < m.size(); ++b) {
                const double h = m[a].second.cwiseProduct(m[b].second.transpose()).sum();
                st.hessian(m[a].first, m[b].first) += h;
                if (a != b) st.hessian(m[b].first, m[a].first) += h;
            }
        }
    }
    return st;
}

}  // namespace

SolveResult LmiSystem::maximize_margin(double gap_tolerance, double margin_cap) const {
    SolveResult out;
    const int dim = vars_ + 1;
    Vector xi = Vector::Zero(dim);
    double start = std::numeric_limits<double>::infinity();
    for (double s : slacks(xi.head(vars_))) start = std::min(start, s);
    if (constraints_.empty()) start = 0.0;
    xi(vars_) = std::min(start - 1.0, margin_cap - 1.0);

    double barrier_dim = 1.0;
    for (const auto& c : constraints_) barrier_dim += static_cast<double>(c.expr.rows());

    double weight = 1.0;
    constexpr double kGrowth = 8.0;
    constexpr int kMaxNewton = 200;
    bool stalled = false;
    while (true) {
        int iterations = 0;
        for (; iterations < kMaxNewton; ++iterations) {
            BarrierState st = barrier_derivatives(constraints_, xi, margin_cap);
            Vector grad = st.gradient;
            grad(vars_) -= weight;
            const double ridge = 1e-14 * (1.0 + st.hessian.diagonal().cwiseAbs().maxCoeff());
            st.hessian.diagonal().array() += ridge;
            Eigen::LDLT<Matrix> ldlt(st.hessian);
            const Vector step = -ldlt.solve(grad);
            if (!step.allFinite()) {
                out.message = "Newton system is singular";
                return out;
            }
            const double decrement = -grad.dot(step);
            ++out.newton_steps;
            if (decrement < 1e-12) break;

            double f0 = 0.0;
            barrier_value(constraints_, xi, margin_cap, f0);
            f0 -= weight * xi(vars_);
            double alpha = 1.0;
            bool accepted = false;
            for (int halvings = 0; halvings < 80; ++halvings, alpha *= 0.5) {
                const Vector trial = xi + alpha * step;
                double f1 = 0.0;
                if (!barrier_value(constraints_, trial, margin_cap, f1)) continue;
                f1 -= weight * trial(vars_);
                if (f1 <= f0 - 0.25 * alpha * decrement) {
                    xi = trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                // Round-off floor: no further progress is representable.
                stalled = true;
                break;
            }
        }
        if (barrier_dim / weight < gap_tolerance) break;
        if (stalled) {
            // Accept when the remaining gap is already small in absolute terms.
            if (barrier_dim / weight < 1e3 * gap_tolerance) break;
            out.message = "barrier method stalled";
            out.x = xi.head(vars_);
            out.margin = xi(vars_);
            return out;
        }
        weight *= kGrowth;
    }
    out.converged = true;
    out.x = xi.head(vars_);
    out.margin = xi(vars_);
    if (out.margin > 0.5 * margin_cap) {
        out.converged = false;
        out.message = "margin unbounded; add normalization constraints";
    }
    return out;
}

}  // namespace relcon::sdp
