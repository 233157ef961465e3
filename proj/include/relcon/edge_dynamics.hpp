#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relcon/graph.hpp"
#include "relcon/linalg.hpp"
#include "relcon/sector.hpp"

namespace relcon {

struct AgentDynamics {
    Matrix A;  // n x n
    Matrix B;  // n x m

    AgentDynamics() = default;
    AgentDynamics(Matrix a, Matrix b);

    [[nodiscard]] int n() const { return static_cast<int>(A.rows()); }
    [[nodiscard]] int m() const { return static_cast<int>(B.cols()); }

    // PBH rank test on every eigenvalue with Re >= -1e-9.
    [[nodiscard]] bool stabilizable() const;
    // All eigenvalues of A satisfy Re <= 1e-9.
    [[nodiscard]] bool marginally_stable() const;
    // Human-readable notes for any violated standing assumption. These are
    // warnings only; the LMI reports infeasibility on its own.
    [[nodiscard]] std::vector<std::string> assumption_warnings() const;
};

// z = (E^T kron I_n) x, block j equals x_tail - x_head.
Vector edge_state(const Vector& x, const Matrix& incidence, int n);

struct TransformedEdgeState {
    Vector z1;  // n (M-N+1)
    Vector z2;  // n (N-1)
};

// (U^T kron I_n) z, split after the first U1.cols() edge coordinates.
TransformedEdgeState transform_edge_state(const Vector& z, const SpectralData& spectral, int n);
// (U kron I_n) [z1; z2]
Vector inverse_transform_edge_state(const TransformedEdgeState& zt, const SpectralData& spectral,
                                    int n);

// u = (E kron K) Phi((E^T kron I_n) x)
Vector consensus_input(const Matrix& K, const Matrix& incidence, const ChannelBank& bank,
                       const Vector& x);

// w2 = ((C U2^T) kron K) Phi(z), C the reduced coupling (Gamma on the general path).
Vector stabilizing_input(const Matrix& K, const SpectralData& spectral, const ChannelBank& bank,
                         const Vector& z);

// Lur'e network matrices of the reduced edge subsystem.
struct EdgeSystem {
    Matrix Atilde;  // I_{N-1} kron A
    Matrix Btilde;  // (C U2^T) kron (B K)
};

EdgeSystem lure_network(const AgentDynamics& agents, const SpectralData& spectral, const Matrix& K);

// Right-hand side of the full closed-loop MAS.
Vector mas_vector_field(const AgentDynamics& agents, const Matrix& incidence, const Matrix& K,
                        const ChannelBank& bank, const Vector& x);

// Right-hand side of the reduced edge subsystem, with z rebuilt as (U2 kron I) z2.
Vector reduced_vector_field(const AgentDynamics& agents, const SpectralData& spectral,
                            const Matrix& K, const ChannelBank& bank, const Vector& z2);

struct EquivalenceReport {
    double max_projection_gap = 0.0;  // max_t |(U2^T kron I) z_full - z2_reduced|
    double max_z1_norm = 0.0;         // max_t |(U1^T kron I) z_full|
    long steps = 0;

    [[nodiscard]] bool pass(double tol = 1e-6) const {
        return max_projection_gap <= tol && max_z1_norm <= tol;
    }
};

// Integrates the full MAS and the reduced subsystem side by side with the
// same RK4 step and compares them after every step.
EquivalenceReport equivalence_check(const AgentDynamics& agents, const GraphMatrices& mats,
                                    const SpectralData& spectral, const Matrix& K,
                                    const ChannelBank& bank, const Vector& x0, double horizon,
                                    double step = 1e-3);

}  // namespace relcon
