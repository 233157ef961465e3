#include "relcon/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "relcon/rk4.hpp"

namespace relcon {

double consensus_error(const Vector& x, int nodes, int n) {
    double worst = 0.0;
    for (int i = 0; i < nodes; ++i) {
        for (int j = i + 1; j < nodes; ++j) {
            worst = std::max(worst, (x.segment(i * n, n) - x.segment(j * n, n)).norm());
        }
    }
    return worst;
}

double lyapunov_value(const Vector& z, const SpectralData& spectral, const Matrix& P) {
    const auto n = P.rows();
    const Vector z2 = transform_edge_state(z, spectral, static_cast<int>(n)).z2;
    double v = 0.0;
    for (Eigen::Index b = 0; b < z2.size() / n; ++b) {
        const auto seg = z2.segment(b * n, n);
        v += seg.dot(P * seg);
    }
    return v;
}

SimulationTrace simulate(const AgentDynamics& agents, const GraphMatrices& mats,
                         const SpectralData& spectral, const Matrix& K, const ChannelBank& bank,
                         const Vector& x0, double horizon, double step,
                         const std::optional<Matrix>& P) {
    if (!(step > 0.0) || horizon < step) {
        throw Error(ErrorCode::DimensionMismatch, "simulation needs step > 0 and horizon >= step");
    }
    const int n = agents.n();
    const int nodes = static_cast<int>(mats.incidence.rows());
    if (x0.size() != nodes * n) {
        throw Error(ErrorCode::DimensionMismatch, "initial state must have N*n entries");
    }
    if (bank.size() != mats.incidence.cols() * n) {
        throw Error(ErrorCode::ChannelCountMismatch, "channel bank does not cover M*n channels");
    }
    if (K.rows() != agents.m() || K.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "gain K must be m x n");
    }

    SimulationTrace tr;
    tr.nodes = nodes;
    tr.edges = static_cast<int>(mats.incidence.cols());
    tr.n = n;
    tr.m = agents.m();
    tr.step = step;
    const long steps = step_count(horizon, step);
    tr.times.reserve(steps + 1);

    auto record = [&](long k, const Vector& x) {
        const Vector z = edge_state(x, mats.incidence, n);
        tr.times.push_back(static_cast<double>(k) * step);
        tr.x.push_back(x);
        tr.z.push_back(z);
        tr.y.push_back(apply(bank, z));
        tr.u.push_back(consensus_input(K, mats.incidence, bank, x));
        if (P) tr.V.push_back(lyapunov_value(z, spectral, *P));
        tr.consensus_error.push_back(consensus_error(x, nodes, n));
    };

    auto field = [&](const Vector& s) { return mas_vector_field(agents, mats.incidence, K, bank, s); };
    Vector x = x0;
    record(0, x);
    for (long k = 1; k <= steps; ++k) {
        rk4_step(x, step, field);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12) {
            throw DivergenceError("state exceeded 1e12 at t = " + std::to_string(k * step),
                                  std::move(tr));
        }
        record(k, x);
    }
    return tr;
}

LyapunovAudit lyapunov_audit(const SimulationTrace& trace, const SpectralData& spectral,
                             const Matrix& P, double epsilon) {
    LyapunovAudit out;
    if (trace.size() == 0) return out;
    const double v0 = lyapunov_value(trace.z.front(), spectral, P);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.times[k] - trace.times.front();
        const double v = lyapunov_value(trace.z[k], spectral, P);
        const double envelope = v0 * std::exp(-epsilon * t);
        if (envelope > 0.0) out.worst_ratio = std::max(out.worst_ratio, v / envelope);
        if (v > envelope * (1.0 + 1e-6) + 1e-12 && out.pass) {
            out.pass = false;
            out.first_violation = static_cast<long>(k);
            out.violation_time = trace.times[k];
        }
    }
    return out;
}

ConstraintAudit constraint_audit(const SimulationTrace& trace, std::optional<double> limit,
                                 const std::optional<SectorBounds>& sector) {
    ConstraintAudit out;
    const int channels = trace.edges * trace.n;
    out.channels.assign(static_cast<std::size_t>(channels), {});
    for (std::size_t s = 0; s < trace.size(); ++s) {
        for (int c = 0; c < channels; ++c) {
            auto& ch = out.channels[static_cast<std::size_t>(c)];
            const double z = trace.z[s](c);
            const double y = trace.y[s](c);
            ch.max_abs_y = std::max(ch.max_abs_y, std::abs(y));
            ch.max_abs_z = std::max(ch.max_abs_z, std::abs(z));
            if (sector) {
                const int k = c % trace.n;
                const double p = (y - sector->sigma1()[k] * z) * (y - sector->sigma2()[k] * z);
                ch.max_sector_product = s == 0 ? p : std::max(ch.max_sector_product, p);
            }
        }
    }
    for (const auto& ch : out.channels) {
        out.max_abs_y = std::max(out.max_abs_y, ch.max_abs_y);
        out.max_abs_z = std::max(out.max_abs_z, ch.max_abs_z);
        if (sector && ch.max_sector_product > 1e-12) out.sector_ok = false;
    }
    if (limit) out.within_limit = out.max_abs_y <= *limit + 1e-9;
    return out;
}

std::vector<std::size_t> sample_rows(std::size_t count, int stride) {
    const auto every = static_cast<std::size_t>(std::max(stride, 1));
    std::vector<std::size_t> rows;
    for (std::size_t s = 0; s < count; s += every) rows.push_back(s);
    if (count > 0 && rows.back() != count - 1) rows.push_back(count - 1);
    return rows;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const SimulationTrace& trace, int stride) {
    os << "t";
    for (int i = 1; i <= trace.nodes; ++i)
        for (int k = 1; k <= trace.n; ++k) os << ",x_" << i << '_' << k;
    for (int j = 1; j <= trace.edges; ++j)
        for (int k = 1; k <= trace.n; ++k) os << ",z_" << j << '_' << k;
    for (int j = 1; j <= trace.edges; ++j)
        for (int k = 1; k <= trace.n; ++k) os << ",y_" << j << '_' << k;
    for (int i = 1; i <= trace.nodes; ++i)
        for (int k = 1; k <= trace.m; ++k) os << ",u_" << i << '_' << k;
    os << ",V,consensus_error\n";
    for (std::size_t s : sample_rows(trace.size(), stride)) {
        os << format_number(trace.times[s]);
        for (const auto* series : {&trace.x, &trace.z, &trace.y, &trace.u}) {
            const Vector& v = (*series)[s];
            for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << format_number(v(i));
        }
        os << ',' << (trace.V.empty() ? std::string("nan") : format_number(trace.V[s]));
        os << ',' << format_number(trace.consensus_error[s]) << '\n';
    }
}

}  // namespace relcon
