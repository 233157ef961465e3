#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "relcon/edge_dynamics.hpp"
#include "relcon/graph.hpp"

namespace testing {

using relcon::Matrix;

// Random spanning tree on N nodes plus `extra` random additional edges (1-based pairs).
inline std::vector<std::pair<int, int>> random_connected_edges(std::mt19937_64& rng, int N, int extra) {
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i + 1;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < N; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        int a = order[i], b = order[pick(rng)];
        if (rng() & 1) std::swap(a, b);
        edges.emplace_back(a, b);
        seen.insert({std::min(a, b), std::max(a, b)});
    }
    const int max_edges = N * (N - 1) / 2;
    std::uniform_int_distribution<int> node(1, N);
    while (extra > 0 && static_cast<int>(seen.size()) < max_edges) {
        int a = node(rng), b = node(rng);
        if (a == b || seen.count({std::min(a, b), std::max(a, b)})) continue;
        seen.insert({std::min(a, b), std::max(a, b)});
        edges.emplace_back(a, b);
        --extra;
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    return edges;
}

inline relcon::NetworkGraph random_connected_graph(std::mt19937_64& rng, int min_n, int max_n) {
    std::uniform_int_distribution<int> nd(min_n, max_n);
    const int N = nd(rng);
    std::uniform_int_distribution<int> ex(0, N * (N - 1) / 2 - (N - 1));
    const auto edges = random_connected_edges(rng, N, ex(rng));
    return relcon::build_graph(N, edges);
}

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

// Single-input companion-form agent with poles drawn in [-2, -0.2].
inline relcon::AgentDynamics random_stable_agent(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> pole(-2.0, -0.2);
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n + 1);
    coeffs(0) = 1.0;
    for (int k = 0; k < n; ++k) {
        const double p = pole(rng);
        for (int j = k + 1; j >= 1; --j) coeffs(j) -= p * coeffs(j - 1);
    }
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) A(n - 1, j) = -coeffs(n - j);
    Matrix B = Matrix::Zero(n, 1);
    B(n - 1, 0) = 1.0;
    return {A, B};
}

inline relcon::Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
    return random_matrix(rng, n, 1, scale).col(0);
}

}  // namespace testing
