#include "relcon/robot.hpp"

#include <cmath>
#include <ostream>

#include "relcon/rk4.hpp"

namespace relcon {

Eigen::Matrix2d heading_map(double theta, double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::Config, "robot parameter r must be positive");
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::Matrix2d M;
    M << c, -r * s, s, r * c;
    return M;
}

Eigen::Vector2d body_velocities(double theta, double r, const Eigen::Vector2d& u) {
    if (!(r > 0.0)) throw Error(ErrorCode::Config, "robot parameter r must be positive");
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * u(0) + s * u(1), (-s * u(0) + c * u(1)) / r};
}

RealInputs real_inputs(const Eigen::Vector2d& body) {
    RealInputs in;
    in.v = body(0);
    if (std::abs(body(0)) < 1e-12 && std::abs(body(1)) < 1e-12) {
        in.steer = 0.0;
    } else {
        in.steer = std::atan2(body(1), body(0));
    }
    return in;
}

Eigen::Vector2d reconstruct_input(double theta, double r, const RealInputs& in) {
    const Eigen::Vector2d body(in.v, in.v * std::tan(in.steer));
    return heading_map(theta, r) * body;
}

RobotTrace simulate_robots(const GraphMatrices& mats, const Matrix& K, const ChannelBank& bank,
                           const std::vector<RobotState>& initial, double r, double horizon,
                           double step) {
    if (!(step > 0.0) || horizon < step) {
        throw Error(ErrorCode::DimensionMismatch, "simulation needs step > 0 and horizon >= step");
    }
    if (!(r > 0.0)) throw Error(ErrorCode::Config, "robot parameter r must be positive");
    const int nodes = static_cast<int>(mats.incidence.rows());
    const int edges = static_cast<int>(mats.incidence.cols());
    if (static_cast<int>(initial.size()) != nodes) {
        throw Error(ErrorCode::DimensionMismatch, "need one initial pose per robot");
    }
    if (K.rows() != 2 || K.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "robot gain must be 2 x 2");
    if (bank.size() != edges * 2) {
        throw Error(ErrorCode::ChannelCountMismatch, "channel bank does not cover M*2 channels");
    }

    auto points = [&](const Vector& s) {
        Vector x(2 * nodes);
        for (int i = 0; i < nodes; ++i) x.segment<2>(2 * i) = s.segment<2>(3 * i);
        return x;
    };
    auto field = [&](const Vector& s) {
        const Vector u = consensus_input(K, mats.incidence, bank, points(s));
        Vector ds(3 * nodes);
        for (int i = 0; i < nodes; ++i) {
            const Eigen::Vector2d ui = u.segment<2>(2 * i);
            const Eigen::Vector2d vw = body_velocities(s(3 * i + 2), r, ui);
            ds.segment<2>(3 * i) = heading_map(s(3 * i + 2), r) * vw;
            ds(3 * i + 2) = vw(1);
        }
        return ds;
    };

    RobotTrace tr;
    auto& pt = tr.points;
    pt.nodes = nodes;
    pt.edges = edges;
    pt.n = pt.m = 2;
    pt.step = step;

    auto record = [&](long k, const Vector& s) {
        const Vector x = points(s);
        const Vector z = edge_state(x, mats.incidence, 2);
        const Vector u = consensus_input(K, mats.incidence, bank, x);
        pt.times.push_back(static_cast<double>(k) * step);
        pt.x.push_back(x);
        pt.z.push_back(z);
        pt.y.push_back(apply(bank, z));
        pt.u.push_back(u);
        pt.consensus_error.push_back(consensus_error(x, nodes, 2));
        Vector th(nodes), v(nodes), w(nodes), phi(nodes);
        for (int i = 0; i < nodes; ++i) {
            th(i) = s(3 * i + 2);
            const Eigen::Vector2d body = body_velocities(th(i), r, u.segment<2>(2 * i));
            const RealInputs in = real_inputs(body);
            v(i) = in.v;
            w(i) = body(1);
            phi(i) = in.steer;
        }
        tr.theta.push_back(th);
        tr.v.push_back(v);
        tr.omega.push_back(w);
        tr.steer.push_back(phi);
    };

    Vector s(3 * nodes);
    for (int i = 0; i < nodes; ++i) s.segment<3>(3 * i) << initial[i].xc, initial[i].yc, initial[i].theta;
    const long steps = step_count(horizon, step);
    record(0, s);
    for (long k = 1; k <= steps; ++k) {
        rk4_step(s, step, field);
        if (!s.allFinite() || s.cwiseAbs().maxCoeff() > 1e12) {
            throw DivergenceError("robot state exceeded 1e12 at t = " + std::to_string(k * step), pt);
        }
        record(k, s);
    }
    return tr;
}

void write_robot_csv(std::ostream& os, const RobotTrace& trace, int stride) {
    const auto& pt = trace.points;
    os << "t";
    for (int i = 1; i <= pt.nodes; ++i) os << ",xc_" << i << ",yc_" << i;
    for (const char* name : {"theta", "v", "omega", "steer"})
        for (int i = 1; i <= pt.nodes; ++i) os << ',' << name << '_' << i;
    for (const char* name : {"z", "y"})
        for (int j = 1; j <= pt.edges; ++j)
            for (int k = 1; k <= 2; ++k) os << ',' << name << '_' << j << '_' << k;
    os << ",consensus_error\n";
    for (std::size_t s : sample_rows(pt.size(), stride)) {
        os << format_number(pt.times[s]);
        for (const auto* series : {&pt.x, &trace.theta, &trace.v, &trace.omega, &trace.steer, &pt.z, &pt.y}) {
            const Vector& v = (*series)[s];
            for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << format_number(v(i));
        }
        os << ',' << format_number(pt.consensus_error[s]) << '\n';
    }
}

}  // namespace relcon
