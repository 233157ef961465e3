#include "relcon/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "relcon/error.hpp"

namespace relcon {

namespace {

bool traverse_connected(int node_count, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(node_count);
    for (const auto& e : edges) {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<bool> seen(node_count, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == node_count;
}

// Multiset distance between sorted spectra.
double spectrum_error(const Vector& got, const std::vector<double>& expected) {
    std::vector<double> sorted(expected);
    std::sort(sorted.begin(), sorted.end());
    double err = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        err = std::max(err, std::abs(got(static_cast<Eigen::Index>(i)) - sorted[i]));
    }
    return err;
}

}  // namespace

NetworkGraph build_graph(int node_count, std::span<const std::pair<int, int>> edges) {
    if (node_count < 2) {
        throw Error(ErrorCode::InvalidEdge, "graph needs at least two nodes");
    }
    if (edges.empty()) {
        throw Error(ErrorCode::InvalidEdge, "graph has no edges");
    }
    NetworkGraph g;
    g.node_count = node_count;
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edges) {
        if (a < 1 || a > node_count || b < 1 || b > node_count) {
            throw Error(ErrorCode::InvalidEdge, "edge (" + std::to_string(a) + "," +
                                                    std::to_string(b) + ") out of range");
        }
        if (a == b) {
            throw Error(ErrorCode::InvalidEdge, "self-loop at node " + std::to_string(a));
        }
        const int lo = std::min(a, b) - 1;
        const int hi = std::max(a, b) - 1;
        if (!seen.insert({lo, hi}).second) {
            throw Error(ErrorCode::InvalidEdge, "duplicate edge (" + std::to_string(a) + "," +
                                                    std::to_string(b) + ")");
        }
        g.edges.push_back({lo, hi});
    }
    g.connected = traverse_connected(node_count, g.edges);
    return g;
}

NetworkGraph complete_graph(int node_count) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= node_count; ++i) {
        for (int j = i + 1; j <= node_count; ++j) edges.emplace_back(i, j);
    }
    return build_graph(node_count, edges);
}

NetworkGraph path_graph(int node_count) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < node_count; ++i) edges.emplace_back(i, i + 1);
    return build_graph(node_count, edges);
}

double zero_tolerance(double lambda_max) { return 1e-9 * std::max(1.0, lambda_max); }

Vector symmetric_eigenvalues(const Matrix& m) {
    if (m.size() == 0) return Vector{};
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "symmetric eigendecomposition failed");
    }
    return es.eigenvalues();
}

GraphMatrices graph_matrices(const NetworkGraph& graph) {
    const int n = graph.node_count;
    const int m = graph.edge_count();
    GraphMatrices out;
    out.incidence = Matrix::Zero(n, m);
    for (int j = 0; j < m; ++j) {
        out.incidence(graph.edges[j].tail, j) = 1.0;
        out.incidence(graph.edges[j].head, j) = -1.0;
    }
    out.laplacian = out.incidence * out.incidence.transpose();
    out.edge_laplacian = out.incidence.transpose() * out.incidence;

    Eigen::SelfAdjointEigenSolver<Matrix> es(out.laplacian);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "Laplacian eigendecomposition failed");
    }
    const Vector& lam = es.eigenvalues();
    const double tol = zero_tolerance(lam.maxCoeff());
    out.pseudoinverse = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (std::abs(lam(k)) > tol) {
            const Vector v = es.eigenvectors().col(k);
            out.pseudoinverse += (v * v.transpose()) / lam(k);
        }
    }
    out.lbar = out.incidence.transpose() * out.pseudoinverse * out.incidence;
    return out;
}

std::vector<double> SpectralData::nonzero_eigenvalues() const {
    return {lambda.data() + 1, lambda.data() + lambda.size()};
}

Matrix SpectralData::reduced_coupling() const {
    const auto k = U2.cols();
    return F.bottomRightCorner(k, k);
}

SpectralData spectral_data(const GraphMatrices& mats, SpectralOptions options) {
    const auto n = mats.laplacian.rows();
    const auto m = mats.incidence.cols();

    Eigen::SelfAdjointEigenSolver<Matrix> es(mats.laplacian);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalFailure, "Laplacian eigendecomposition failed");
    }
    SpectralData sd;
    sd.lambda = es.eigenvalues();
    const double tol = zero_tolerance(sd.lambda_max());
    if (sd.lambda(1) <= tol) {
        throw Error(ErrorCode::Disconnected, "graph not connected (lambda_2 = " +
                                                 std::to_string(sd.lambda(1)) + ")");
    }
    sd.lambda(0) = 0.0;

    sd.V = es.eigenvectors();
    sd.V.col(0) = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    sd.V2 = sd.V.rightCols(n - 1);
    sd.Gamma = sd.lambda.tail(n - 1).asDiagonal();

    const Vector inv_sqrt = sd.lambda.tail(n - 1).cwiseSqrt().cwiseInverse();
    const bool tree = (m == n - 1);
    if (tree && options.tree_shortcut) {
        sd.tree_shortcut = true;
        sd.U = Matrix::Identity(m, m);
        sd.U1 = Matrix::Zero(m, 0);
        sd.U2 = sd.U;
    } else {
        sd.U2 = mats.incidence.transpose() * sd.V2 * inv_sqrt.asDiagonal();
        const auto null_dim = m - (n - 1);
        if (null_dim > 0) {
            Eigen::JacobiSVD<Matrix> svd(mats.incidence, Eigen::ComputeFullV);
            sd.U1 = svd.matrixV().rightCols(null_dim);
        } else {
            sd.U1 = Matrix::Zero(m, 0);
        }
        sd.U.resize(m, m);
        sd.U << sd.U1, sd.U2;
    }
    sd.F = sd.U.transpose() * mats.edge_laplacian * sd.U;

    // L-bar: {0 x (M-N+1), 1 x (N-1)}; L_e: {0 x (M-N+1)} plus the nonzero spectrum of L.
    std::vector<double> lbar_expected(static_cast<std::size_t>(m - n + 1), 0.0);
    lbar_expected.insert(lbar_expected.end(), static_cast<std::size_t>(n - 1), 1.0);
    sd.lbar_spectrum_error = spectrum_error(symmetric_eigenvalues(mats.lbar), lbar_expected);

    std::vector<double> le_expected(static_cast<std::size_t>(m - n + 1), 0.0);
    for (auto lam : sd.nonzero_eigenvalues()) le_expected.push_back(lam);
    sd.edge_spectrum_error =
        spectrum_error(symmetric_eigenvalues(mats.edge_laplacian), le_expected);

    if (sd.lbar_spectrum_error > 1e-8 || sd.edge_spectrum_error > 1e-8) {
        throw Error(ErrorCode::NumericalFailure, "edge spectra deviate from the Laplacian spectrum");
    }
    return sd;
}

}  // namespace relcon
