#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "relcon/error.hpp"
#include "relcon/synthesis.hpp"
#include "support.hpp"

using namespace relcon;

namespace {

SynthesisProblem robot(double s1 = 0.75) {
    SynthesisProblem p;
    p.agents = AgentDynamics(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
    p.lambda2 = p.lambda_max = 3.0;
    p.bounds = SectorBounds::scalar(1, s1, 1.0);
    p.epsilon = 0.4;
    return p;
}

SynthesisProblem oscillator(double s1, double s2) {
    Matrix A(2, 2), B(2, 1);
    A << 0, 1, -1, 0;
    B << 0, 1;
    SynthesisProblem p;
    p.agents = AgentDynamics(A, B);
    p.lambda2 = p.lambda_max = 3.0;
    p.bounds = SectorBounds::scalar(2, s1, s2);
    p.epsilon = 0.1;
    return p;
}

Matrix row(double a, double b) {
    Matrix K(1, 2);
    K << a, b;
    return K;
}

}  // namespace

TEST_CASE("variant parsing") {
    CHECK(parse_variant("diagonal_x") == Variant::DiagonalX);
    CHECK_THROWS_AS(parse_variant("other"), Error);
}

TEST_CASE("problem validation") {
    auto p = robot();
    CHECK_NOTHROW(p.validate());
    p.variant = Variant::DiagonalX;
    auto q = oscillator(0.7, 1.3);
    q.variant = Variant::DiagonalX;
    CHECK_THROWS_AS(q.validate(), Error);
    q.variant = Variant::ScalarSector;
    q.bounds = SectorBounds({0.5, 0.7}, {1.0, 1.3});
    CHECK_THROWS_AS(q.validate(), Error);
    auto r = robot();
    r.epsilon = 0.0;
    CHECK_THROWS_AS(r.validate(), Error);
    r = robot();
    r.lambda2 = 4.0;
    CHECK_THROWS_AS(r.validate(), Error);
    CHECK_THROWS_AS(SectorBounds::scalar(1, 1.0, 1.0), Error);
}

TEST_CASE("assembled block sizes") {
    const auto lmi = assemble(oscillator(0.7, 1.3));
    CHECK(lmi.Y.rows() == 1);
    CHECK(lmi.Y.cols() == 2);
    CHECK(lmi.Z.rows() == 2);
    for (const auto& c : lmi.system.constraints()) {
        if (c.name == "lmi_lambda2") CHECK(c.expr.rows() == 4);
        if (c.name == "coupling") CHECK(c.expr.rows() == 4);
    }
}

TEST_CASE("robot scalar problem is feasible and its certificate verifies") {
    const auto p = robot();
    const auto r = solve(p);
    REQUIRE(r.feasible());
    CHECK(r.worst_residual() <= 1e-7);
    CHECK(r.W(0, 0) > 0.0);
    CHECK((r.K - r.Y * r.X.inverse()).norm() < 1e-12);
    // The LMI certifies K <= -eps / (2 lambda2 sigma1) on this problem.
    CHECK(r.K(0, 0) <= -0.4 / (2.0 * 3.0 * 0.75) + 1e-9);
    const auto v = verify_synthesis(r, p, {3.0});
    CHECK(v.pass(1e-7));
}

TEST_CASE("tampered certificates fail verification") {
    SynthesisProblem p;
    Matrix A(2, 2);
    A << -1, 0.5, 0, -0.5;
    p.agents = AgentDynamics(A, Matrix::Identity(2, 2));
    p.lambda2 = 1.0;
    p.lambda_max = 3.0;
    p.bounds = SectorBounds::scalar(2, 0.6, 1.4);
    p.epsilon = 0.1;
    const auto r = solve(p);
    REQUIRE(r.feasible());
    CHECK(verify_synthesis(r, p, {1.0, 2.0, 3.0}).pass(1e-7));
    auto tampered = r;
    tampered.Y *= 10.0;
    tampered.K *= 10.0;
    CHECK(verify_synthesis(tampered, p, {1.0, 3.0}).worst > 0.0);

    auto singular = r;
    singular.X = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(verify_synthesis(singular, p, {1.0}), Error);
}

TEST_CASE("reference gain interval for the robot") {
    const auto p = robot();
    const double lower = -p.epsilon / (p.lambda2 * 1.0);
    CHECK(lower == doctest::Approx(-0.4 / 3.0).epsilon(1e-15));
    const auto gi = admissible_scalar_gains(p);
    CHECK(gi.upper == doctest::Approx(-0.4 / 4.5).epsilon(1e-5));
    CHECK(-0.1 <= gi.upper);
    CHECK(-0.1 > lower);
}

TEST_CASE("global saturation sector [0, 1] gives no admissible gain") {
    auto p = robot(0.0);
    CHECK(solve(p).status == SynthesisStatus::Infeasible);
}

TEST_CASE("oscillator problems") {
    const auto pu = oscillator(0.7, 1.3);
    const auto ru = solve(pu);
    REQUIRE(ru.feasible());
    CHECK(verify_synthesis(ru, pu, {3.0}).pass(1e-7));

    const auto pc = oscillator(0.4, 1.0);
    const auto rc = solve(pc);
    REQUIRE(rc.feasible());
    CHECK(verify_synthesis(rc, pc, {3.0}).pass(1e-7));

    const auto au = analyze_fixed_gain(row(-1.1309, -2.2191), pu);
    REQUIRE(au.feasible());
    CHECK(au.worst_residual() <= 1e-7);
    CHECK(decay_inequality(row(-1.1309, -2.2191), au.P, au.Psi, pu, 3.0) <= 1e-9);

    const auto ac = analyze_fixed_gain(row(-2.3825, -20.68), pc);
    REQUIRE(ac.feasible());
    CHECK(ac.worst_residual() <= 1e-7);

    CHECK(analyze_fixed_gain(row(0.0, 0.0), pu).status == SynthesisStatus::Infeasible);
}

TEST_CASE("diagonal-X variant on a non-scalar sector") {
    SynthesisProblem p;
    Matrix A(2, 2);
    A << -1, 0.5, 0, -0.5;
    p.agents = AgentDynamics(A, Matrix::Identity(2, 2));
    p.lambda2 = 1.0;
    p.lambda_max = 3.0;
    p.bounds = SectorBounds({0.6, 0.8}, {1.2, 1.4});
    p.epsilon = 0.1;
    p.variant = Variant::DiagonalX;
    const auto r = solve(p);
    REQUIRE(r.feasible());
    CHECK(r.X(0, 1) == 0.0);
    CHECK(r.W(0, 1) == 0.0);
    CHECK(r.worst_residual() <= 1e-7);
    CHECK(verify_synthesis(r, p, {1.0, 1.7, 3.0}).pass(1e-7));
    CHECK(analyze_fixed_gain(r.K, p).feasible());
}

TEST_CASE("diagonal X cannot certify decay when a state has no direct input") {
    // The (1,1) entry of the lambda block is eps x1 > 0 for the oscillator.
    auto p = oscillator(0.7, 1.3);
    p.bounds = SectorBounds({0.6, 0.8}, {1.2, 1.4});
    p.variant = Variant::DiagonalX;
    CHECK(solve(p).status == SynthesisStatus::Infeasible);
}

TEST_CASE("max_epsilon bisection contract and monotonicity") {
    // The uncontrolled mode at -0.3 caps the decay rate at 0.6.
    auto p = oscillator(0.7, 1.3);
    Matrix A(2, 2);
    A << -0.3, 0, 0, 0;
    p.agents = AgentDynamics(A, p.agents.B);
    const double e = max_epsilon(p, 0.01, 5.0);
    CHECK(e == doctest::Approx(0.6).epsilon(2e-3));
    p.epsilon = e;
    CHECK(solve(p).feasible());
    p.epsilon = e + 1e-3;
    CHECK_FALSE(solve(p).feasible());
    for (double smaller : {0.5 * e, 0.1 * e}) {
        p.epsilon = smaller;
        CHECK(solve(p).feasible());
    }
    auto bad = robot(0.0);
    CHECK_THROWS_AS(max_epsilon(bad, 0.01, 1.0), Error);
    // Without a cap the gain can grow with epsilon, so the upper end is returned.
    CHECK(max_epsilon(robot(), 0.01, 5.0) == 5.0);
}

TEST_CASE("scalar boundary matches the grid oracle") {
    struct Case {
        double a, eps;
    };
    for (const auto& c : {Case{0.0, 0.4}, Case{-0.5, 1.5}}) {
        SynthesisProblem p;
        p.agents = AgentDynamics(Matrix::Constant(1, 1, c.a), Matrix::Ones(1, 1));
        p.lambda2 = 1.0;
        p.lambda_max = 3.0;
        p.bounds = SectorBounds::scalar(1, 0.5, 1.0);
        p.epsilon = c.eps;
        const double solved = admissible_scalar_gains(p).upper;
        const double grid = oracle::scalar_boundary(c.a, 0.5, 1.0, c.eps, {1.0, 3.0});
        CHECK(std::abs(solved - grid) <= 2e-3);
        CHECK(analyze_fixed_gain(Matrix::Constant(1, 1, solved - 0.01), p).feasible());
        CHECK_FALSE(analyze_fixed_gain(Matrix::Constant(1, 1, solved + 0.01), p).feasible());
    }
}

TEST_CASE("blocks are affine in lambda") {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto agents = testing::random_stable_agent(rng, 2);
        SynthesisProblem p;
        p.agents = agents;
        p.lambda2 = 0.5;
        p.lambda_max = 4.0;
        p.bounds = SectorBounds::scalar(2, 0.5, 1.5);
        p.epsilon = 0.05;
        const auto r = solve(p);
        if (!r.feasible()) continue;
        ++checked;
        const Matrix S1 = p.bounds.Sigma1(), S2 = p.bounds.Sigma2();
        auto top = [&](double lam) {
            return max_eigenvalue(
                oracle::synthesis_block(agents.A, agents.B, S1, S2, p.epsilon, lam, r.X, r.Y, r.Z));
        };
        const double worst = std::max(top(p.lambda2), top(p.lambda_max));
        for (int i = 1; i <= 10; ++i) {
            const double th = i / 11.0;
            CHECK(top((1 - th) * p.lambda2 + th * p.lambda_max) <= worst + 1e-9);
        }
    }
    CHECK(checked > 5);
}
