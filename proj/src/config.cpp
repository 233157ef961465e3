#include "relcon/config.hpp"

#include <fstream>
#include <sstream>

#include "relcon/error.hpp"

namespace relcon {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::Config, what); }

const json& need(const json& j, const char* key, const char* section) {
    if (!j.is_object() || !j.contains(key)) {
        fail(std::string("missing '") + key + "' in " + section + " section");
    }
    return j.at(key);
}

std::vector<double> number_list(const json& j) {
    if (j.is_number()) return {j.get<double>()};
    return j.get<std::vector<double>>();
}

ChannelKind parse_kind(const std::string& s) {
    if (s == "identity") return ChannelKind::Identity;
    if (s == "saturation") return ChannelKind::Saturation;
    if (s == "static_gain") return ChannelKind::StaticGain;
    if (s == "table") return ChannelKind::Table;
    fail("unknown channel kind '" + s + "'");
}

std::vector<double> broadcast(const std::vector<double>& v, int n, const char* what) {
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(n), v.front());
    if (static_cast<int>(v.size()) != n) {
        fail(std::string(what) + " must have 1 or n = " + std::to_string(n) + " entries");
    }
    return v;
}

}  // namespace

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) fail("empty matrix");
    const auto cols = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) fail("ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    }
    return rows;
}

RunConfig parse_config(const json& j) {
    try {
        RunConfig c;
        const json& g = need(j, "graph", "top-level");
        c.graph.nodes = need(g, "nodes", "graph").get<int>();
        for (const auto& e : need(g, "edges", "graph")) {
            if (!e.is_array() || e.size() != 2) fail("edges must be [i, j] pairs");
            c.graph.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }

        if (j.contains("agent")) {
            const json& a = j.at("agent");
            c.agent = AgentSection{need(a, "A", "agent").get<std::vector<std::vector<double>>>(),
                                   need(a, "B", "agent").get<std::vector<std::vector<double>>>()};
        }

        if (j.contains("sector")) {
            const json& s = j.at("sector");
            SectorSection sec;
            if (s.contains("sigma1")) sec.sigma1 = number_list(s.at("sigma1"));
            if (s.contains("sigma2")) sec.sigma2 = number_list(s.at("sigma2"));
            if (s.contains("operating_bound")) sec.operating_bound = s.at("operating_bound").get<double>();
            if (s.contains("seed")) sec.seed = s.at("seed").get<std::uint64_t>();
            const json& ch = need(s, "channel", "sector");
            sec.channel.kind = parse_kind(need(ch, "kind", "channel").get<std::string>());
            if (ch.contains("limit")) sec.channel.limit = ch.at("limit").get<double>();
            if (ch.contains("gains")) sec.channel.gains = number_list(ch.at("gains"));
            if (ch.contains("gain_range")) {
                const auto r = ch.at("gain_range").get<std::vector<double>>();
                if (r.size() != 2) fail("gain_range must be [lo, hi]");
                sec.channel.gain_range = std::make_pair(r[0], r[1]);
            }
            if (ch.contains("knots")) {
                for (const auto& k : ch.at("knots")) sec.channel.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
            }
            c.sector = std::move(sec);
        }

        if (j.contains("synthesis")) {
            const json& s = j.at("synthesis");
            SynthesisSection syn;
            if (s.contains("variant")) syn.variant = parse_variant(s.at("variant").get<std::string>());
            if (s.contains("epsilon")) syn.epsilon = s.at("epsilon").get<double>();
            if (s.contains("epsilon_range")) {
                const auto r = s.at("epsilon_range").get<std::vector<double>>();
                if (r.size() != 2) fail("epsilon_range must be [lo, hi]");
                syn.epsilon_range = std::make_pair(r[0], r[1]);
            }
            if (s.contains("gain")) syn.gain = s.at("gain").get<std::vector<std::vector<double>>>();
            c.synthesis = std::move(syn);
        }

        if (j.contains("simulation")) {
            const json& s = j.at("simulation");
            SimulationSection sim;
            sim.x0 = need(s, "x0", "simulation").get<std::vector<double>>();
            if (s.contains("horizon")) sim.horizon = s.at("horizon").get<double>();
            if (s.contains("step")) sim.step = s.at("step").get<double>();
            c.simulation = std::move(sim);
        }

        if (j.contains("robot")) c.robot = RobotSection{need(j.at("robot"), "r", "robot").get<double>()};

        if (j.contains("output")) {
            const json& o = j.at("output");
            if (o.contains("directory")) c.output.directory = o.at("directory").get<std::string>();
            if (o.contains("formats")) c.output.formats = o.at("formats").get<std::vector<std::string>>();
            if (o.contains("stride")) c.output.stride = o.at("stride").get<int>();
        }

        if (c.agent) {
            const auto& A = c.agent->A;
            const auto& B = c.agent->B;
            if (A.empty() || A.size() != B.size()) fail("agent A and B must have the same row count");
            for (const auto& row : A)
                if (row.size() != A.size()) fail("agent A must be square");
            if (c.simulation && !c.robot) {
                const auto want = static_cast<std::size_t>(c.graph.nodes) * A.size();
                if (c.simulation->x0.size() != want) {
                    fail("simulation x0 must have N*n = " + std::to_string(want) + " entries");
                }
            }
            if (c.synthesis && c.synthesis->gain) {
                const auto& K = *c.synthesis->gain;
                if (K.size() != B.front().size() || K.front().size() != A.size()) {
                    fail("synthesis gain must be m x n");
                }
            }
        }
        if (c.robot && c.simulation && c.simulation->x0.size() != 3 * static_cast<std::size_t>(c.graph.nodes)) {
            fail("robot x0 must list (x_C, y_C, theta) for every robot");
        }
        return c;
    } catch (const json::exception& e) {
        fail(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    json edges = json::array();
    for (const auto& [a, b] : c.graph.edges) edges.push_back({a, b});
    j["graph"] = {{"nodes", c.graph.nodes}, {"edges", edges}};
    if (c.agent) j["agent"] = {{"A", c.agent->A}, {"B", c.agent->B}};
    if (c.sector) {
        const auto& s = *c.sector;
        json ch = {{"kind", to_string(s.channel.kind)}};
        if (s.channel.kind == ChannelKind::Saturation) ch["limit"] = s.channel.limit;
        if (!s.channel.gains.empty()) ch["gains"] = s.channel.gains;
        if (s.channel.gain_range) ch["gain_range"] = {s.channel.gain_range->first, s.channel.gain_range->second};
        if (!s.channel.knots.empty()) {
            json knots = json::array();
            for (const auto& [x, y] : s.channel.knots) knots.push_back({x, y});
            ch["knots"] = knots;
        }
        json sec = {{"channel", ch}, {"seed", s.seed}};
        if (!s.sigma1.empty()) sec["sigma1"] = s.sigma1;
        if (!s.sigma2.empty()) sec["sigma2"] = s.sigma2;
        if (s.operating_bound) sec["operating_bound"] = *s.operating_bound;
        j["sector"] = sec;
    }
    if (c.synthesis) {
        const auto& s = *c.synthesis;
        json syn = {{"variant", to_string(s.variant)}};
        if (s.epsilon) syn["epsilon"] = *s.epsilon;
        if (s.epsilon_range) syn["epsilon_range"] = {s.epsilon_range->first, s.epsilon_range->second};
        if (s.gain) syn["gain"] = *s.gain;
        j["synthesis"] = syn;
    }
    if (c.simulation) {
        j["simulation"] = {{"x0", c.simulation->x0},
                           {"horizon", c.simulation->horizon},
                           {"step", c.simulation->step}};
    }
    if (c.robot) j["robot"] = {{"r", c.robot->r}};
    j["output"] = {{"directory", c.output.directory},
                   {"formats", c.output.formats},
                   {"stride", c.output.stride}};
    return j;
}

NetworkGraph config_graph(const RunConfig& c) { return build_graph(c.graph.nodes, c.graph.edges); }

AgentDynamics config_agents(const RunConfig& c) {
    if (!c.agent) fail("config has no agent section");
    return {to_matrix(c.agent->A), to_matrix(c.agent->B)};
}

SectorBounds config_bounds(const RunConfig& c, int n) {
    if (!c.sector) fail("config has no sector section");
    const auto& s = *c.sector;
    if (!s.sigma1.empty() || !s.sigma2.empty()) {
        if (s.sigma1.empty() || s.sigma2.empty()) fail("sector needs both sigma1 and sigma2");
        return {broadcast(s.sigma1, n, "sigma1"), broadcast(s.sigma2, n, "sigma2")};
    }
    if (s.operating_bound && s.channel.kind == ChannelKind::Saturation) {
        if (!(*s.operating_bound > s.channel.limit)) fail("operating_bound must exceed the saturation limit");
        return SectorBounds::scalar(n, s.channel.limit / *s.operating_bound, 1.0);
    }
    fail("sector section must give sigma1/sigma2 (or operating_bound for saturation)");
}

ChannelBank config_bank(const RunConfig& c, int edges, int n) {
    if (!c.sector) fail("config has no sector section");
    const auto& ch = c.sector->channel;
    switch (ch.kind) {
        case ChannelKind::Identity: return ChannelBank::uniform(edges, n, SectorChannel::identity());
        case ChannelKind::Saturation: return ChannelBank::uniform(edges, n, SectorChannel::saturation(ch.limit));
        case ChannelKind::StaticGain:
            if (ch.gain_range) {
                return ChannelBank::random_gains(edges, n, ch.gain_range->first, ch.gain_range->second,
                                                 c.sector->seed);
            }
            return ChannelBank::component_gains(edges, broadcast(ch.gains, n, "gains"));
        case ChannelKind::Table: return ChannelBank::uniform(edges, n, SectorChannel::table(ch.knots));
    }
    fail("unsupported channel kind");
}

const SynthesisSection& config_synthesis(const RunConfig& c) {
    if (!c.synthesis) fail("config has no synthesis section");
    return *c.synthesis;
}

const SimulationSection& config_simulation(const RunConfig& c) {
    if (!c.simulation) fail("config has no simulation section");
    return *c.simulation;
}

}  // namespace relcon
