#include "relcon/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relcon/error.hpp"

namespace relcon {

using sdp::AffineExpr;

const char* to_string(Variant v) {
    return v == Variant::DiagonalX ? "diagonal_x" : "scalar_sector";
}

Variant parse_variant(const std::string& s) {
    if (s == "diagonal_x") return Variant::DiagonalX;
    if (s == "scalar_sector") return Variant::ScalarSector;
    throw Error(ErrorCode::Config, "unknown synthesis variant '" + s + "'");
}

const char* to_string(SynthesisStatus s) {
    switch (s) {
        case SynthesisStatus::Feasible: return "feasible";
        case SynthesisStatus::Infeasible: return "infeasible";
        case SynthesisStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

void SynthesisProblem::validate() const {
    if (bounds.dimension() != agents.n()) {
        throw Error(ErrorCode::DimensionMismatch, "sector bounds must have one entry per state component");
    }
    for (int k = 0; k < bounds.dimension(); ++k) {
        if (!(bounds.sigma1()[k] < bounds.sigma2()[k])) {
            throw Error(ErrorCode::InvalidSector, "sector bounds require sigma1 < sigma2");
        }
    }
    if (!(lambda2 > 0.0) || lambda_max < lambda2) {
        throw Error(ErrorCode::DimensionMismatch, "need 0 < lambda2 <= lambda_max");
    }
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::DimensionMismatch, "decay rate epsilon must be positive");
    }
    if (variant == Variant::ScalarSector && !bounds.is_scalar()) {
        throw Error(ErrorCode::VariantMismatch, "scalar-sector variant needs Sigma1, Sigma2 multiples of I");
    }
    if (variant == Variant::DiagonalX && bounds.is_scalar() && agents.n() > 1) {
        throw Error(ErrorCode::VariantMismatch,
                    "diagonal-X variant applies to sectors that are not multiples of I");
    }
}

double SynthesisProblem::strictness() const { return 1e-8 * (1.0 + agents.A.norm()); }

namespace {

std::vector<double> distinct_lambdas(const SynthesisProblem& p) {
    std::vector<double> out{p.lambda2};
    if (p.lambda_max - p.lambda2 > 1e-12) out.push_back(p.lambda_max);
    return out;
}

std::string lambda_name(const SynthesisProblem& p, double lam) {
    return lam == p.lambda2 ? "lmi_lambda2" : "lmi_lambdaN";
}

// Adds the certificate constraints given an expression for Y (free or pinned).
void add_synthesis_constraints(SynthesisLmi& lmi, const SynthesisProblem& p, const AffineExpr& Y) {
    const int n = p.agents.n();
    const int m = p.agents.m();
    const Matrix& A = p.agents.A;
    const Matrix& B = p.agents.B;
    const Matrix S1 = p.bounds.Sigma1();
    const Matrix S2 = p.bounds.Sigma2();
    const Matrix I = Matrix::Identity(n, n);
    auto& sys = lmi.system;

    for (double lam : distinct_lambdas(p)) {
        const AffineExpr top = sdp::sym(A * lmi.X + lam * (B * Y * S2)) + p.epsilon * lmi.X;
        const AffineExpr off = lam * (B * Y) + (S1 - S2) * lmi.Z;
        const std::string name = lambda_name(p, lam);
        sys.require_nsd(name, sdp::block(top, off, off.transpose(), -2.0 * lmi.Z));
        lmi.certificate_blocks.push_back(name);
    }
    sys.require_psd("X", lmi.X);
    sys.require_psd("coupling", sdp::block(lmi.Z, lmi.X, lmi.X, lmi.W));
    sys.require_psd("W", lmi.W);
    lmi.certificate_blocks.insert(lmi.certificate_blocks.end(), {"X", "coupling", "W"});

    const double rho = kNormalizationBound;
    const double rho_y = kGainNormalizationBound;
    sys.require_nsd("norm_X", lmi.X - AffineExpr(I));
    sys.require_nsd("norm_Z", lmi.Z - AffineExpr(Matrix(rho * I)));
    sys.require_nsd("norm_W", lmi.W - AffineExpr(Matrix(rho * I)));
    if (!lmi.Y.terms().empty()) {
        sys.require_psd("norm_Y", sdp::block(AffineExpr(Matrix(rho_y * I)), Y.transpose(), Y,
                                             AffineExpr(Matrix(rho_y * Matrix::Identity(m, m)))));
    }
}

SynthesisResult finish(const SynthesisLmi& lmi, const SynthesisProblem& p, const Matrix* pinned) {
    SynthesisResult out;
    const auto sol = lmi.system.maximize_margin();
    out.margin = sol.margin;
    if (!sol.converged) {
        out.status = SynthesisStatus::NumericalFailure;
        out.message = sol.message;
        return out;
    }
    out.X = lmi.X.evaluate(sol.x);
    out.Z = lmi.Z.evaluate(sol.x);
    out.W = lmi.W.evaluate(sol.x);
    out.Y = pinned ? Matrix(*pinned * out.X) : lmi.Y.evaluate(sol.x);
    const auto slacks = lmi.system.slacks(sol.x);
    for (std::size_t i = 0; i < lmi.system.constraints().size(); ++i) {
        const auto& name = lmi.system.constraints()[i].name;
        if (std::find(lmi.certificate_blocks.begin(), lmi.certificate_blocks.end(), name) !=
            lmi.certificate_blocks.end()) {
            out.residuals.emplace_back(name, -slacks[i]);
        }
    }
    if (sol.margin < p.strictness()) {
        out.status = SynthesisStatus::Infeasible;
        out.message = "maximal margin " + std::to_string(sol.margin) + " below strictness threshold";
        return out;
    }
    out.status = SynthesisStatus::Feasible;
    out.K = pinned ? *pinned : Matrix(out.X.ldlt().solve(out.Y.transpose()).transpose());
    return out;
}

// Decay inequality with Psi^{-1} = W written as an LMI in W:
// [Q0 + lam^2 BK W K^T B^T, 1/2 X D; 1/2 D X, -W] <= 0 with D = Sigma1 - Sigma2.
Matrix decay_constant(const SynthesisProblem& p, const Matrix& X, const Matrix& K, double lam) {
    const Matrix& A = p.agents.A;
    const Matrix bk = p.agents.B * K;
    const Matrix S = p.bounds.Sigma1() + p.bounds.Sigma2();
    return X * A.transpose() + A * X + p.epsilon * X + 0.5 * lam * sym(bk * S * X);
}

// The certificate constraints involve W only through the coupling block, so any
// diagonal W keeping that block positive is an equally valid solution. Pick
// the one that satisfies the decay inequality with the largest margin; keep the original W
// when none does.
void refine_w(SynthesisResult& r, const SynthesisProblem& p) {
    const int n = p.agents.n();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix D = p.bounds.Sigma1() - p.bounds.Sigma2();
    const Matrix bk = p.agents.B * r.K;
    sdp::LmiSystem sys;
    const AffineExpr W = sys.diagonal(n);
    for (double lam : distinct_lambdas(p)) {
        const AffineExpr top = AffineExpr(decay_constant(p, r.X, r.K, lam)) + (lam * lam) * (bk * W * Matrix(bk.transpose()));
        const AffineExpr off(Matrix(0.5 * r.X * D));
        sys.require_nsd("decay", sdp::block(top, off, off.transpose(), -W));
    }
    sys.require_psd("coupling", sdp::block(AffineExpr(r.Z), AffineExpr(r.X), AffineExpr(r.X), W));
    sys.require_psd("W", W);
    sys.require_nsd("norm_W", W - AffineExpr(Matrix(kNormalizationBound * I)));
    const auto sol = sys.maximize_margin();
    if (!sol.converged || sol.margin < p.strictness()) return;
    r.W = W.evaluate(sol.x);
    const auto slacks = sys.slacks(sol.x);
    for (auto& [name, value] : r.residuals) {
        if (name == "coupling") value = -slacks[slacks.size() - 3];
        if (name == "W") value = -slacks[slacks.size() - 2];
    }
}

}  // namespace

double SynthesisResult::worst_residual() const {
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& [name, r] : residuals) w = std::max(w, r);
    return w;
}

double AnalysisResult::worst_residual() const {
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& [name, r] : residuals) w = std::max(w, r);
    return w;
}

SynthesisLmi assemble(const SynthesisProblem& problem) {
    problem.validate();
    const int n = problem.agents.n();
    SynthesisLmi lmi;
    lmi.X = problem.variant == Variant::DiagonalX ? lmi.system.diagonal(n) : lmi.system.symmetric(n);
    lmi.Y = lmi.system.full(problem.agents.m(), n);
    lmi.Z = lmi.system.symmetric(n);
    lmi.W = lmi.system.diagonal(n);
    add_synthesis_constraints(lmi, problem, lmi.Y);
    return lmi;
}

SynthesisResult solve(const SynthesisProblem& problem) {
    const SynthesisLmi lmi = assemble(problem);
    SynthesisResult r = finish(lmi, problem, nullptr);
    if (r.feasible() && problem.variant == Variant::DiagonalX) refine_w(r, problem);
    return r;
}

SynthesisResult solve_with_gain(const SynthesisProblem& problem, const Matrix& K) {
    problem.validate();
    const int n = problem.agents.n();
    if (K.rows() != problem.agents.m() || K.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "gain K must be m x n");
    }
    SynthesisLmi lmi;
    lmi.X = problem.variant == Variant::DiagonalX ? lmi.system.diagonal(n) : lmi.system.symmetric(n);
    lmi.Z = lmi.system.symmetric(n);
    lmi.W = lmi.system.diagonal(n);
    add_synthesis_constraints(lmi, problem, K * lmi.X);
    return finish(lmi, problem, &K);
}

VerificationReport verify_synthesis(const SynthesisResult& result, const SynthesisProblem& problem,
                                    const std::vector<double>& lambdas) {
    if (!result.feasible()) {
        throw Error(ErrorCode::Infeasible, "cannot verify an infeasible synthesis result");
    }
    const Matrix& X = result.X;
    Eigen::SelfAdjointEigenSolver<Matrix> es(X, Eigen::EigenvaluesOnly);
    const double xmin = es.eigenvalues().minCoeff();
    const double xmax = es.eigenvalues().maxCoeff();
    if (!(xmin > 1e-12 * std::max(1.0, xmax))) {
        throw Error(ErrorCode::SingularX, "X is not positive definite to tolerance");
    }
    const Matrix& A = problem.agents.A;
    const Matrix& B = problem.agents.B;
    const Matrix S1 = problem.bounds.Sigma1();
    const Matrix S2 = problem.bounds.Sigma2();
    const double eps = problem.epsilon;

    VerificationReport report;
    report.worst = -std::numeric_limits<double>::infinity();
    for (double lam : lambdas) {
        Matrix q;
        if (problem.variant == Variant::DiagonalX) {
            // Psi = W^{-1}, so B K Psi^{-1} K^T B^T = B K W K^T B^T.
            const Matrix psi = result.W.diagonal().cwiseInverse().asDiagonal();
            const Matrix bk = B * result.K;
            const Matrix diff = S1 - S2;
            q = X * A.transpose() + A * X + eps * X + lam * lam * bk * result.W * bk.transpose() +
                0.5 * lam * sym(bk * (S1 + S2) * X) + 0.25 * X * psi * diff * diff * X;
        } else {
            const double s1 = problem.bounds.sigma1().front();
            const double s2 = problem.bounds.sigma2().front();
            const Matrix g = lam * B * result.Y + (s1 - s2) * result.Z;
            Eigen::LLT<Matrix> zl(result.Z);
            if (zl.info() != Eigen::Success) {
                report.max_eigenvalue.emplace_back(lam, std::numeric_limits<double>::infinity());
                report.worst = std::numeric_limits<double>::infinity();
                continue;
            }
            q = sym(A * X + s2 * lam * B * result.Y) + eps * X + 0.5 * g * zl.solve(g.transpose());
        }
        const double top = max_eigenvalue(q);
        report.max_eigenvalue.emplace_back(lam, top);
        report.worst = std::max(report.worst, top);
    }
    return report;
}

double decay_inequality(const Matrix& K, const Matrix& P, const Matrix& Psi,
                        const SynthesisProblem& problem, double lambda) {
    const Matrix& A = problem.agents.A;
    const Matrix& B = problem.agents.B;
    const Matrix S1 = problem.bounds.Sigma1();
    const Matrix S2 = problem.bounds.Sigma2();
    const Matrix pbk = P * B * K;
    const Matrix diff = S1 - S2;
    const Matrix psi_inv = Psi.diagonal().cwiseInverse().asDiagonal();
    const Matrix q = A.transpose() * P + P * A + problem.epsilon * P +
                     lambda * lambda * pbk * psi_inv * pbk.transpose() +
                     0.5 * lambda * sym(pbk * (S1 + S2)) + 0.25 * Psi * diff * diff;
    return max_eigenvalue(q);
}

AnalysisResult analyze_fixed_gain(const Matrix& K, const SynthesisProblem& problem) {
    if (problem.bounds.dimension() != problem.agents.n()) {
        throw Error(ErrorCode::DimensionMismatch, "sector bounds must have one entry per state component");
    }
    const int n = problem.agents.n();
    if (K.rows() != problem.agents.m() || K.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "gain K must be m x n");
    }
    const Matrix& A = problem.agents.A;
    const Matrix& B = problem.agents.B;
    const Matrix S1 = problem.bounds.Sigma1();
    const Matrix S2 = problem.bounds.Sigma2();
    const Matrix diff2 = (S1 - S2) * (S1 - S2);
    const Matrix I = Matrix::Identity(n, n);

    sdp::LmiSystem sys;
    const AffineExpr P = sys.symmetric(n);
    const AffineExpr Psi = sys.diagonal(n);
    std::vector<std::string> certificate;
    for (double lam : distinct_lambdas(problem)) {
        const AffineExpr pbk = P * Matrix(B * K);
        const AffineExpr top = sdp::sym(P * A) + problem.epsilon * P + 0.5 * lam * sdp::sym(pbk * (S1 + S2)) +
                               0.25 * (Psi * diff2);
        const AffineExpr off = lam * pbk;
        const std::string name = lambda_name(problem, lam);
        sys.require_nsd(name, sdp::block(top, off, off.transpose(), -Psi));
        certificate.push_back(name);
    }
    sys.require_psd("P", P);
    sys.require_psd("Psi", Psi);
    certificate.insert(certificate.end(), {"P", "Psi"});
    sys.require_nsd("norm_P", P - AffineExpr(I));
    sys.require_nsd("norm_Psi", Psi - AffineExpr(Matrix(kNormalizationBound * I)));

    AnalysisResult out;
    const auto sol = sys.maximize_margin();
    out.margin = sol.margin;
    if (!sol.converged) {
        out.status = SynthesisStatus::NumericalFailure;
        out.message = sol.message;
        return out;
    }
    out.P = P.evaluate(sol.x);
    out.Psi = Psi.evaluate(sol.x);
    const auto slacks = sys.slacks(sol.x);
    for (std::size_t i = 0; i < sys.constraints().size(); ++i) {
        const auto& name = sys.constraints()[i].name;
        if (std::find(certificate.begin(), certificate.end(), name) != certificate.end()) {
            out.residuals.emplace_back(name, -slacks[i]);
        }
    }
    if (sol.margin < problem.strictness()) {
        out.status = SynthesisStatus::Infeasible;
        out.message = "no (P, Psi) certifies this gain at the requested decay rate";
        return out;
    }
    out.status = SynthesisStatus::Feasible;
    for (double lam : distinct_lambdas(problem)) {
        out.residuals.emplace_back("decay_" + lambda_name(problem, lam).substr(4),
                                   decay_inequality(K, out.P, out.Psi, problem, lam));
    }
    return out;
}

double max_epsilon(SynthesisProblem problem, double lo, double hi, double tolerance) {
    if (!(lo > 0.0) || !(hi > lo)) {
        throw Error(ErrorCode::DimensionMismatch, "epsilon range must satisfy 0 < lo < hi");
    }
    auto feasible = [&](double eps) {
        problem.epsilon = eps;
        const auto r = solve(problem);
        if (r.status == SynthesisStatus::NumericalFailure) {
            throw Error(ErrorCode::NumericalFailure, "solver failed at epsilon = " + std::to_string(eps));
        }
        return r.feasible();
    };
    if (!feasible(lo)) {
        throw Error(ErrorCode::NoneFeasible, "synthesis infeasible at the smallest epsilon");
    }
    if (feasible(hi)) return hi;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

GainInterval admissible_scalar_gains(const SynthesisProblem& problem, double k_min, double tolerance) {
    if (problem.agents.n() != 1 || problem.agents.m() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "scalar gain interval needs n = m = 1");
    }
    auto feasible = [&](double k) {
        return solve_with_gain(problem, Matrix::Constant(1, 1, k)).feasible();
    };
    if (!feasible(k_min)) {
        throw Error(ErrorCode::NoneFeasible, "no admissible gain at k_min");
    }
    GainInterval out{k_min, 0.0};
    if (feasible(0.0)) return out;
    double lo = k_min, hi = 0.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    out.upper = lo;
    return out;
}

}  // namespace relcon
