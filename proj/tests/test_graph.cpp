#include <doctest.h>

#include <random>

#include "relcon/error.hpp"
#include "relcon/graph.hpp"
#include "support.hpp"

using namespace relcon;

namespace {

NetworkGraph g(int n, std::vector<std::pair<int, int>> e) { return build_graph(n, e); }

double sorted_gap(Vector a, Vector b) {
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("build_graph basics") {
    const auto k3 = g(3, {{1, 2}, {2, 3}, {1, 3}});
    CHECK(k3.connected);
    CHECK(k3.edge_count() == 3);
    CHECK_FALSE(k3.is_spanning_tree());

    const auto p3 = g(3, {{1, 2}, {2, 3}});
    CHECK(p3.connected);
    CHECK(p3.edge_count() == 2);
    CHECK(p3.is_spanning_tree());

    CHECK_FALSE(g(4, {{1, 2}, {3, 4}}).connected);
}

TEST_CASE("build_graph rejects bad edges") {
    auto code = [](int n, std::vector<std::pair<int, int>> e) {
        try {
            build_graph(n, e);
        } catch (const Error& err) {
            return err.code();
        }
        return ErrorCode::Config;
    };
    CHECK(code(3, {{1, 1}}) == ErrorCode::InvalidEdge);
    CHECK(code(3, {{1, 4}}) == ErrorCode::InvalidEdge);
    CHECK(code(3, {{0, 2}}) == ErrorCode::InvalidEdge);
    CHECK(code(3, {{1, 2}, {2, 1}}) == ErrorCode::InvalidEdge);
    CHECK(code(1, {}) == ErrorCode::InvalidEdge);
}

TEST_CASE("P2 incidence and laplacian") {
    const auto m = graph_matrices(g(2, {{1, 2}}));
    CHECK(m.incidence(0, 0) == 1.0);
    CHECK(m.incidence(1, 0) == -1.0);
    Matrix L(2, 2);
    L << 1, -1, -1, 1;
    CHECK((m.laplacian - L).norm() == 0.0);
}

TEST_CASE("orientation runs from lower to higher index") {
    const auto m = graph_matrices(g(3, {{3, 1}}));
    CHECK(m.incidence(0, 0) == 1.0);
    CHECK(m.incidence(2, 0) == -1.0);
}

TEST_CASE("K3 and P3 spectra") {
    const auto k3 = spectral_data(graph_matrices(complete_graph(3)));
    CHECK(k3.lambda(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(k3.lambda(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(k3.lambda(2) == doctest::Approx(3.0).epsilon(1e-12));

    const auto p3m = graph_matrices(path_graph(3));
    const auto p3 = spectral_data(p3m);
    CHECK(p3.lambda(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p3.lambda(2) == doctest::Approx(3.0).epsilon(1e-12));

    // Characteristic polynomial lambda (lambda - 1)(lambda - 3) of the path Laplacian.
    for (int i = 0; i < 3; ++i) {
        const double l = p3.lambda(i);
        CHECK(std::abs(l * (l - 1.0) * (l - 3.0)) < 1e-10);
    }
}

TEST_CASE("spanning tree lbar is identity and U1 is empty") {
    const auto m = graph_matrices(path_graph(3));
    CHECK((m.lbar - Matrix::Identity(2, 2)).norm() < 1e-10);
    const auto sd = spectral_data(m);
    CHECK(sd.U1.cols() == 0);
    CHECK(sd.tree_shortcut);
    CHECK((sd.U - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("K3 lbar spectrum and U orthogonality") {
    const auto m = graph_matrices(complete_graph(3));
    const Vector ev = symmetric_eigenvalues(m.lbar);
    CHECK(std::abs(ev(0)) < 1e-8);
    CHECK(std::abs(ev(1) - 1.0) < 1e-8);
    CHECK(std::abs(ev(2) - 1.0) < 1e-8);
    const auto sd = spectral_data(m);
    CHECK((sd.U2.transpose() * sd.U2 - Matrix::Identity(2, 2)).norm() < 1e-9);
    CHECK((sd.U2.transpose() * sd.U1).norm() < 1e-9);
    CHECK((m.incidence * sd.U1).norm() < 1e-9);
}

TEST_CASE("V1 is the normalized ones vector") {
    const auto sd = spectral_data(graph_matrices(complete_graph(5)));
    for (int i = 0; i < 5; ++i) CHECK(sd.V(i, 0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("disconnected graphs are rejected by spectral_data") {
    const auto m = graph_matrices(g(4, {{1, 2}, {3, 4}}));
    CHECK_THROWS_AS(spectral_data(m), Error);
    try {
        spectral_data(m);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Disconnected);
    }
}

TEST_CASE("random connected graphs satisfy the structural identities") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto graph = testing::random_connected_graph(rng, 2, 8);
        const auto m = graph_matrices(graph);
        const int N = graph.node_count, M = graph.edge_count();
        CHECK((m.laplacian - m.incidence * m.incidence.transpose()).norm() == 0.0);
        CHECK((m.incidence.transpose() * Vector::Ones(N)).norm() == 0.0);
        CHECK((m.laplacian * m.pseudoinverse * m.laplacian - m.laplacian).norm() < 1e-9);

        for (bool shortcut : {true, false}) {
            const auto sd = spectral_data(m, {shortcut});
            CHECK(sd.lbar_spectrum_error < 1e-8);
            CHECK(sd.edge_spectrum_error < 1e-8);
            CHECK((sd.U.transpose() * sd.U - Matrix::Identity(M, M)).norm() < 1e-9);
            CHECK((sd.U * sd.F * sd.U.transpose() - m.edge_laplacian).norm() < 1e-8);
            if (!sd.tree_shortcut) {
                Matrix Fexp = Matrix::Zero(M, M);
                Fexp.bottomRightCorner(N - 1, N - 1) = sd.Gamma;
                CHECK((sd.F - Fexp).norm() < 1e-8);
                CHECK((sd.U2.transpose() * m.edge_laplacian * sd.U2 - sd.Gamma).norm() < 1e-8);
            }
            const Matrix VLV = sd.V.transpose() * m.laplacian * sd.V;
            Matrix D = Matrix::Zero(N, N);
            D.bottomRightCorner(N - 1, N - 1) = sd.Gamma;
            CHECK((VLV - D).norm() < 1e-8);
        }
    }
}

TEST_CASE("flipping edge orientations leaves the spectra and lbar unchanged") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto graph = testing::random_connected_graph(rng, 3, 7);
        const auto m = graph_matrices(graph);
        Matrix E = m.incidence;
        for (int j = 0; j < E.cols(); ++j)
            if (rng() & 1) E.col(j) *= -1.0;
        const Matrix L = E * E.transpose();
        const Matrix Le = E.transpose() * E;
        const Matrix lbar = E.transpose() * m.pseudoinverse * E;
        CHECK((L - m.laplacian).norm() < 1e-10);
        CHECK(sorted_gap(symmetric_eigenvalues(Le), symmetric_eigenvalues(m.edge_laplacian)) < 1e-10);
        CHECK(sorted_gap(symmetric_eigenvalues(lbar), symmetric_eigenvalues(m.lbar)) < 1e-10);
    }
}

TEST_CASE("zero tolerance scales with the largest eigenvalue") {
    CHECK(zero_tolerance(0.5) == doctest::Approx(1e-9));
    CHECK(zero_tolerance(100.0) == doctest::Approx(1e-7));
}
