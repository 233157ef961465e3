#pragma once

#include <span>
#include <utility>
#include <vector>

#include "relcon/linalg.hpp"

namespace relcon {

// Oriented edge between two 0-based node indices, tail < head.
struct Edge {
    int tail = 0;
    int head = 0;
};

struct NetworkGraph {
    int node_count = 0;
    std::vector<Edge> edges;
    bool connected = false;

    [[nodiscard]] int edge_count() const { return static_cast<int>(edges.size()); }
    [[nodiscard]] bool is_spanning_tree() const {
        return connected && edge_count() == node_count - 1;
    }
};

// Edges are given with 1-based node indices, as in configuration files.
// Orientation is fixed from the lower to the higher index and the column
// order of the incidence matrix follows the input order.
NetworkGraph build_graph(int node_count, std::span<const std::pair<int, int>> edges);

NetworkGraph complete_graph(int node_count);
NetworkGraph path_graph(int node_count);

struct GraphMatrices {
    Matrix incidence;       // E, N x M
    Matrix laplacian;       // L = E E^T
    Matrix pseudoinverse;   // L^+
    Matrix edge_laplacian;  // L_e = E^T E
    Matrix lbar;            // E^T L^+ E
};

GraphMatrices graph_matrices(const NetworkGraph& graph);

// |lambda| <= 1e-9 * max(1, lambda_max) counts as zero.
double zero_tolerance(double lambda_max);

struct SpectralOptions {
    // On spanning trees use U = I (no extra edge transformation).
    bool tree_shortcut = true;
};

struct SpectralData {
    Vector lambda;  // ascending, lambda(0) = 0
    Matrix V;       // orthogonal, first column 1/sqrt(N)
    Matrix V2;      // N x (N-1)
    Matrix Gamma;   // diag(lambda_2 .. lambda_N)
    Matrix U;       // [U1, U2], M x M orthogonal
    Matrix U1;      // M x (M-N+1), spans ker E
    Matrix U2;      // M x (N-1)
    Matrix F;       // U^T L_e U; equals diag(0, Gamma) unless the tree shortcut is active
    bool tree_shortcut = false;

    // Worst deviation of the L-bar / L_e spectra from their expected multisets.
    double lbar_spectrum_error = 0.0;
    double edge_spectrum_error = 0.0;

    [[nodiscard]] double lambda2() const { return lambda(1); }
    [[nodiscard]] double lambda_max() const { return lambda(lambda.size() - 1); }
    [[nodiscard]] std::vector<double> nonzero_eigenvalues() const;

    // Lower-right (N-1)x(N-1) block of F: the coupling seen by the reduced
    // edge subsystem, Gamma on the general path and L_e on the tree shortcut.
    [[nodiscard]] Matrix reduced_coupling() const;
};

SpectralData spectral_data(const GraphMatrices& mats, SpectralOptions options = {});

// Sorted eigenvalues of a symmetric matrix.
Vector symmetric_eigenvalues(const Matrix& m);

}  // namespace relcon
