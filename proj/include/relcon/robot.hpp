#pragma once

#include <vector>

#include <Eigen/Dense>

#include "relcon/simulation.hpp"

namespace relcon {

struct RobotState {
    double xc = 0.0;  // heading point C, dm
    double yc = 0.0;
    double theta = 0.0;
};

// M(theta) = [cos, -r sin; sin, r cos]
Eigen::Matrix2d heading_map(double theta, double r);
// (v, omega) = M^{-1} u
Eigen::Vector2d body_velocities(double theta, double r, const Eigen::Vector2d& u);

struct RealInputs {
    double v = 0.0;
    double steer = 0.0;
};

// v = ut1, steer = atan2(ut2, ut1); steer = 0 when both are below 1e-12.
RealInputs real_inputs(const Eigen::Vector2d& body);
// Forward map back to u: omega = v tan(steer), u = M (v, omega).
Eigen::Vector2d reconstruct_input(double theta, double r, const RealInputs& in);

struct RobotTrace {
    SimulationTrace points;  // heading points as 2-D single integrators
    std::vector<Vector> theta, v, omega, steer;
};

// RK4 on (x_C, y_C, theta) per robot with u = (E kron K) Phi(z) on the heading points.
RobotTrace simulate_robots(const GraphMatrices& mats, const Matrix& K, const ChannelBank& bank,
                           const std::vector<RobotState>& initial, double r, double horizon,
                           double step = 1e-3);

// One row per sample: t, xc_i, yc_i, theta_i, v_i, omega_i, steer_i, z_j_k, y_j_k, consensus_error.
void write_robot_csv(std::ostream& os, const RobotTrace& trace, int stride = 1);

}  // namespace relcon
