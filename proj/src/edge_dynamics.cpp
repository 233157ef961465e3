#include "relcon/edge_dynamics.hpp"

#include <cmath>
#include <complex>

#include "relcon/error.hpp"
#include "relcon/rk4.hpp"

namespace relcon {

namespace {

constexpr double kEigTol = 1e-9;

void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected length " +
                                                      std::to_string(want) + ", got " +
                                                      std::to_string(got));
    }
}

// Column-stacked view: vec(X) with X of shape rows x cols.
Eigen::Map<const Matrix> as_matrix(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    return {v.data(), rows, cols};
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

AgentDynamics::AgentDynamics(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "A must be square and non-empty");
    }
    if (B.rows() != A.rows() || B.cols() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "B must have n rows and at least one column");
    }
}

bool AgentDynamics::stabilizable() const {
    Eigen::EigenSolver<Matrix> es(A, false);
    const auto n = A.rows();
    using CMatrix = Eigen::MatrixXcd;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (lam.real() < -kEigTol) continue;
        CMatrix pbh(n, n + B.cols());
        pbh << A.cast<std::complex<double>>() - lam * CMatrix::Identity(n, n),
            B.cast<std::complex<double>>();
        Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(pbh);
        cod.setThreshold(1e-9);
        if (cod.rank() < n) return false;
    }
    return true;
}

bool AgentDynamics::marginally_stable() const {
    Eigen::EigenSolver<Matrix> es(A, false);
    return es.eigenvalues().real().maxCoeff() <= kEigTol;
}

std::vector<std::string> AgentDynamics::assumption_warnings() const {
    std::vector<std::string> out;
    if (!stabilizable()) out.emplace_back("(A, B) is not stabilizable");
    if (!marginally_stable()) out.emplace_back("A has eigenvalues in the open right half-plane");
    return out;
}

Vector edge_state(const Vector& x, const Matrix& incidence, int n) {
    require_size(x.size(), incidence.rows() * n, "agent state");
    return flatten(as_matrix(x, n, incidence.rows()) * incidence);
}

TransformedEdgeState transform_edge_state(const Vector& z, const SpectralData& spectral, int n) {
    const auto m = spectral.U.rows();
    require_size(z.size(), m * n, "edge state");
    const Matrix zt = as_matrix(z, n, m) * spectral.U;
    const auto k1 = spectral.U1.cols();
    return {flatten(zt.leftCols(k1)), flatten(zt.rightCols(m - k1))};
}

Vector inverse_transform_edge_state(const TransformedEdgeState& zt, const SpectralData& spectral,
                                    int n) {
    const auto m = spectral.U.rows();
    const auto k1 = spectral.U1.cols();
    require_size(zt.z1.size(), k1 * n, "z1");
    require_size(zt.z2.size(), (m - k1) * n, "z2");
    Matrix stacked(n, m);
    stacked << as_matrix(zt.z1, n, k1), as_matrix(zt.z2, n, m - k1);
    return flatten(stacked * spectral.U.transpose());
}

Vector consensus_input(const Matrix& K, const Matrix& incidence, const ChannelBank& bank,
                       const Vector& x) {
    const auto n = K.cols();
    const auto m_edges = incidence.cols();
    if (bank.size() != m_edges * n) {
        throw Error(ErrorCode::ChannelCountMismatch, "channel bank does not cover M*n channels");
    }
    const Vector y = apply(bank, edge_state(x, incidence, static_cast<int>(n)));
    return flatten(K * as_matrix(y, n, m_edges) * incidence.transpose());
}

Vector stabilizing_input(const Matrix& K, const SpectralData& spectral, const ChannelBank& bank,
                         const Vector& z) {
    const auto n = K.cols();
    const auto m_edges = spectral.U.rows();
    require_size(z.size(), m_edges * n, "edge state");
    const Vector y = apply(bank, z);
    // ((C U2^T) kron K) y = vec(K Y (C U2^T)^T)
    const Matrix coupling = spectral.reduced_coupling() * spectral.U2.transpose();
    return flatten(K * as_matrix(y, n, m_edges) * coupling.transpose());
}

EdgeSystem lure_network(const AgentDynamics& agents, const SpectralData& spectral, const Matrix& K) {
    const auto k = spectral.U2.cols();
    return {kron(Matrix::Identity(k, k), agents.A),
            kron(spectral.reduced_coupling() * spectral.U2.transpose(), agents.B * K)};
}

Vector mas_vector_field(const AgentDynamics& agents, const Matrix& incidence, const Matrix& K,
                        const ChannelBank& bank, const Vector& x) {
    const auto nodes = incidence.rows();
    const Vector u = consensus_input(K, incidence, bank, x);
    return flatten(agents.A * as_matrix(x, agents.n(), nodes) +
                   agents.B * as_matrix(u, agents.m(), nodes));
}

Vector reduced_vector_field(const AgentDynamics& agents, const SpectralData& spectral,
                            const Matrix& K, const ChannelBank& bank, const Vector& z2) {
    const int n = agents.n();
    const auto k = spectral.U2.cols();
    require_size(z2.size(), k * n, "z2");
    const Vector z = flatten(as_matrix(z2, n, k) * spectral.U2.transpose());
    const Vector w2 = stabilizing_input(K, spectral, bank, z);
    return flatten(agents.A * as_matrix(z2, n, k) + agents.B * as_matrix(w2, agents.m(), k));
}

EquivalenceReport equivalence_check(const AgentDynamics& agents, const GraphMatrices& mats,
                                    const SpectralData& spectral, const Matrix& K,
                                    const ChannelBank& bank, const Vector& x0, double horizon,
                                    double step) {
    const int n = agents.n();
    require_size(x0.size(), mats.incidence.rows() * n, "initial state");
    if (K.rows() != agents.m() || K.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "gain K must be m x n");
    }

    Vector x = x0;
    Vector z2 = transform_edge_state(edge_state(x0, mats.incidence, n), spectral, n).z2;

    EquivalenceReport report;
    auto compare = [&] {
        const auto zt = transform_edge_state(edge_state(x, mats.incidence, n), spectral, n);
        report.max_projection_gap = std::max(report.max_projection_gap, (zt.z2 - z2).norm());
        report.max_z1_norm = std::max(report.max_z1_norm, zt.z1.size() ? zt.z1.norm() : 0.0);
    };
    compare();

    auto full = [&](const Vector& s) { return mas_vector_field(agents, mats.incidence, K, bank, s); };
    auto reduced = [&](const Vector& s) { return reduced_vector_field(agents, spectral, K, bank, s); };
    const long steps = step_count(horizon, step);
    for (long i = 0; i < steps; ++i) {
        rk4_step(x, step, full);
        rk4_step(z2, step, reduced);
        if (!x.allFinite() || !z2.allFinite() || x.cwiseAbs().maxCoeff() > 1e12) {
            throw Error(ErrorCode::NonFiniteState, "state diverged during equivalence check");
        }
        compare();
    }
    report.steps = steps;
    return report;
}

}  // namespace relcon
