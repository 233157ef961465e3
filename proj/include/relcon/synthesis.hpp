#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relcon/edge_dynamics.hpp"
#include "relcon/sdp.hpp"
#include "relcon/sector.hpp"

namespace relcon {

// DiagonalX: non-scalar sectors, X restricted to diagonal matrices.
// ScalarSector: Sigma1 = s1 I, Sigma2 = s2 I, X full symmetric.
enum class Variant { DiagonalX, ScalarSector };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

struct SynthesisProblem {
    AgentDynamics agents;
    double lambda2 = 0.0;
    double lambda_max = 0.0;
    SectorBounds bounds;
    double epsilon = 0.0;
    Variant variant = Variant::ScalarSector;

    // Throws VariantMismatch / DimensionMismatch / InvalidSector.
    void validate() const;
    // 1e-8 * (1 + |A|): strict inequalities are enforced with at least this margin.
    [[nodiscard]] double strictness() const;
};

// The synthesis and analysis LMIs are homogeneous, so the decision set is
// normalized before the margin is maximized: X <= I (P <= I), |Y|_2 <= 1,
// and Z, W, Psi <= 1e3 I. Feasibility does not depend on these bounds; the
// returned point does.
inline constexpr double kNormalizationBound = 1e3;
inline constexpr double kGainNormalizationBound = 1.0;

// The synthesis LMIs over (X, Y, Z, W) with W standing in for Psi^{-1}.
struct SynthesisLmi {
    sdp::LmiSystem system;
    sdp::AffineExpr X, Y, Z, W;
    // Names of the constraints that belong to the certificate (the rest normalize).
    std::vector<std::string> certificate_blocks;
};

SynthesisLmi assemble(const SynthesisProblem& problem);

enum class SynthesisStatus { Feasible, Infeasible, NumericalFailure };

const char* to_string(SynthesisStatus s);

struct SynthesisResult {
    SynthesisStatus status = SynthesisStatus::NumericalFailure;
    Matrix X, Y, Z, W, K;
    double margin = 0.0;
    // Max eigenvalue of each certificate block written as "block <= 0".
    std::vector<std::pair<std::string, double>> residuals;
    std::string message;

    [[nodiscard]] bool feasible() const { return status == SynthesisStatus::Feasible; }
    [[nodiscard]] double worst_residual() const;
};

SynthesisResult solve(const SynthesisProblem& problem);

// Feasibility of the synthesis LMIs with Y pinned to K X.
SynthesisResult solve_with_gain(const SynthesisProblem& problem, const Matrix& K);

struct VerificationReport {
    std::vector<std::pair<double, double>> max_eigenvalue;  // (lambda_k, value)
    double worst = 0.0;
    [[nodiscard]] bool pass(double tol = 1e-7) const { return worst <= tol; }
};

// Substitutes the recovered variables into the quadratic matrix inequality
// each synthesis variant was derived from, at every lambda_k given.
VerificationReport verify_synthesis(const SynthesisResult& result, const SynthesisProblem& problem,
                                    const std::vector<double>& lambdas);

struct AnalysisResult {
    SynthesisStatus status = SynthesisStatus::NumericalFailure;
    Matrix P, Psi;
    double margin = 0.0;
    std::vector<std::pair<std::string, double>> residuals;
    std::string message;

    [[nodiscard]] bool feasible() const { return status == SynthesisStatus::Feasible; }
    [[nodiscard]] double worst_residual() const;
};

// Searches (P > 0, Psi > 0 diagonal) certifying decay rate epsilon for a given K.
AnalysisResult analyze_fixed_gain(const Matrix& K, const SynthesisProblem& problem);

// Max eigenvalue of the quadratic decay inequality for fixed (K, P, Psi) at one lambda.
double decay_inequality(const Matrix& K, const Matrix& P, const Matrix& Psi,
                        const SynthesisProblem& problem, double lambda);

// Largest feasible epsilon in [lo, hi], to within `tolerance`.
double max_epsilon(SynthesisProblem problem, double lo, double hi, double tolerance = 1e-3);

// For single-input scalar problems (n = m = 1): largest k in [k_min, 0] such that
// the gain-pinned synthesis is feasible on [k_min, k].
struct GainInterval {
    double lower = 0.0;
    double upper = 0.0;
};
GainInterval admissible_scalar_gains(const SynthesisProblem& problem, double k_min = -10.0,
                                     double tolerance = 1e-6);

}  // namespace relcon
