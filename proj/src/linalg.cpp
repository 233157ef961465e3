#include "relcon/linalg.hpp"

#include <algorithm>

#include "relcon/error.hpp"

namespace relcon {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidEdge: return "InvalidEdge";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ChannelCountMismatch: return "ChannelCountMismatch";
        case ErrorCode::InvalidSector: return "InvalidSector";
        case ErrorCode::VariantMismatch: return "VariantMismatch";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::NoneFeasible: return "NoneFeasible";
        case ErrorCode::SingularX: return "SingularX";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double max_eigenvalue(const Matrix& symmetric) {
    if (symmetric.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Matrix& symmetric) {
    if (symmetric.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double asymmetry(const Matrix& a) {
    return (a - a.transpose()).norm() / std::max(1.0, a.norm());
}

}  // namespace relcon
