#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "relcon/edge_dynamics.hpp"
#include "relcon/error.hpp"
#include "relcon/graph.hpp"
#include "relcon/sector.hpp"

namespace relcon {

struct SimulationTrace {
    int nodes = 0, edges = 0, n = 0, m = 0;
    double step = 0.0;
    std::vector<double> times;
    std::vector<Vector> x, z, y, u;
    std::vector<double> V;  // empty unless a Lyapunov matrix was supplied
    std::vector<double> consensus_error;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

// Thrown when |state| exceeds 1e12; carries the samples recorded so far.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, SimulationTrace partial)
        : Error(ErrorCode::NonFiniteState, what), partial_(std::move(partial)) {}
    [[nodiscard]] const SimulationTrace& partial() const { return partial_; }

private:
    SimulationTrace partial_;
};

// Max over agent pairs of |x_i - x_j|_2.
double consensus_error(const Vector& x, int nodes, int n);

// z2^T (I kron P) z2 with z2 the reduced edge coordinates of z.
double lyapunov_value(const Vector& z, const SpectralData& spectral, const Matrix& P);

// Fixed-step RK4 of the closed-loop MAS under u = (E kron K) Phi(z).
SimulationTrace simulate(const AgentDynamics& agents, const GraphMatrices& mats,
                         const SpectralData& spectral, const Matrix& K, const ChannelBank& bank,
                         const Vector& x0, double horizon, double step = 1e-3,
                         const std::optional<Matrix>& P = std::nullopt);

struct LyapunovAudit {
    bool pass = true;
    long first_violation = -1;
    double violation_time = 0.0;
    double worst_ratio = 0.0;  // max_t V(t) / (V(0) e^{-eps t})
};

// Checks V(t) <= V(0) e^{-eps t} (1 + 1e-6) + 1e-12 at every sample.
LyapunovAudit lyapunov_audit(const SimulationTrace& trace, const SpectralData& spectral,
                             const Matrix& P, double epsilon);

struct ChannelAudit {
    double max_abs_y = 0.0;
    double max_abs_z = 0.0;
    double max_sector_product = 0.0;
};

struct ConstraintAudit {
    std::vector<ChannelAudit> channels;
    double max_abs_y = 0.0;
    double max_abs_z = 0.0;
    bool within_limit = true;  // max |y| <= limit + 1e-9 (when a limit is given)
    bool sector_ok = true;     // sector product <= 1e-12 pointwise (when bounds are given)
};

ConstraintAudit constraint_audit(const SimulationTrace& trace, std::optional<double> limit,
                                 const std::optional<SectorBounds>& sector);

// One row per sample: t, x_i_k, z_j_k, y_j_k, u_i_k, V, consensus_error
// (1-based indices), numbers printed with 12 significant digits. stride > 1
// keeps every stride-th sample plus the last one.
void write_csv(std::ostream& os, const SimulationTrace& trace, int stride = 1);

// Sample indices kept by a CSV writer with the given stride.
std::vector<std::size_t> sample_rows(std::size_t count, int stride);

std::string format_number(double v);

}  // namespace relcon
