#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relcon/edge_dynamics.hpp"
#include "relcon/graph.hpp"
#include "relcon/sector.hpp"
#include "relcon/synthesis.hpp"

namespace relcon {

struct GraphSection {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;
};

struct AgentSection {
    std::vector<std::vector<double>> A;
    std::vector<std::vector<double>> B;
};

struct ChannelSpec {
    ChannelKind kind = ChannelKind::Identity;
    double limit = 0.0;                 // saturation
    std::vector<double> gains;          // static_gain: one per component, shared by edges
    std::optional<std::pair<double, double>> gain_range;  // static_gain: seeded draw per channel
    std::vector<std::pair<double, double>> knots;         // table
};

struct SectorSection {
    std::vector<double> sigma1;  // one per component, or a single value broadcast
    std::vector<double> sigma2;
    std::optional<double> operating_bound;  // saturation only: sigma1 = limit / bound, sigma2 = 1
    ChannelSpec channel;
    std::uint64_t seed = 1;
};

struct SynthesisSection {
    Variant variant = Variant::ScalarSector;
    std::optional<double> epsilon;
    std::optional<std::pair<double, double>> epsilon_range;
    std::optional<std::vector<std::vector<double>>> gain;  // fixed K for analyze / verify / simulate
};

struct SimulationSection {
    std::vector<double> x0;
    double horizon = 10.0;
    double step = 1e-3;
};

// Robot reproduction: simulation.x0 then holds (x_C, y_C, theta) per robot.
struct RobotSection {
    double r = 2.0;
};

struct OutputSection {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    int stride = 1;
};

struct RunConfig {
    GraphSection graph;
    std::optional<AgentSection> agent;
    std::optional<SectorSection> sector;
    std::optional<SynthesisSection> synthesis;
    std::optional<SimulationSection> simulation;
    std::optional<RobotSection> robot;
    OutputSection output;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

Matrix to_matrix(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> to_rows(const Matrix& m);

// Section accessors that raise Config errors naming the missing section.
NetworkGraph config_graph(const RunConfig& c);
AgentDynamics config_agents(const RunConfig& c);
SectorBounds config_bounds(const RunConfig& c, int n);
ChannelBank config_bank(const RunConfig& c, int edges, int n);
const SynthesisSection& config_synthesis(const RunConfig& c);
const SimulationSection& config_simulation(const RunConfig& c);

}  // namespace relcon
