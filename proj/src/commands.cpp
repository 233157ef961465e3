#include "relcon/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "relcon/robot.hpp"
#include "relcon/simulation.hpp"
#include "relcon/synthesis.hpp"

namespace relcon {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kConsensusTolerance = 1e-3;
constexpr double kResidualTolerance = 1e-7;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

json mat(const Matrix& m) { return to_rows(m); }

json residual_map(const std::vector<std::pair<std::string, double>>& r) {
    json j = json::object();
    for (const auto& [name, v] : r) j[name] = v;
    return j;
}

struct Network {
    NetworkGraph graph;
    GraphMatrices mats;
    SpectralData spectral;
};

Network network(const RunConfig& c) {
    Network net;
    net.graph = config_graph(c);
    net.mats = graph_matrices(net.graph);
    net.spectral = spectral_data(net.mats);
    return net;
}

double epsilon_of(const RunConfig& c) {
    const auto& syn = config_synthesis(c);
    if (!syn.epsilon) config_error("synthesis section needs epsilon");
    return *syn.epsilon;
}

SynthesisProblem problem_of(const RunConfig& c, const Network& net, double eps) {
    SynthesisProblem p;
    p.agents = config_agents(c);
    p.lambda2 = net.spectral.lambda2();
    p.lambda_max = net.spectral.lambda_max();
    p.bounds = config_bounds(c, p.agents.n());
    p.epsilon = eps;
    p.variant = config_synthesis(c).variant;
    p.validate();
    return p;
}

Matrix gain_of(const RunConfig& c) {
    const auto& syn = config_synthesis(c);
    if (!syn.gain) config_error("synthesis section needs a gain");
    return to_matrix(*syn.gain);
}

json synthesis_json(const SynthesisResult& r) {
    json j = {{"status", to_string(r.status)}, {"margin", r.margin}, {"message", r.message}};
    if (r.feasible()) {
        j["K"] = mat(r.K);
        j["X"] = mat(r.X);
        j["Y"] = mat(r.Y);
        j["Z"] = mat(r.Z);
        j["W"] = mat(r.W);
        j["residuals"] = residual_map(r.residuals);
        j["worst_residual"] = r.worst_residual();
    }
    return j;
}

json verification_json(const VerificationReport& v) {
    json pts = json::array();
    for (const auto& [l, e] : v.max_eigenvalue) pts.push_back({{"lambda", l}, {"max_eigenvalue", e}});
    return {{"points", pts}, {"worst", v.worst}, {"pass", v.pass(kResidualTolerance)}};
}

json analysis_json(const AnalysisResult& a) {
    json j = {{"status", to_string(a.status)}, {"margin", a.margin}, {"message", a.message}};
    if (a.feasible()) {
        j["P"] = mat(a.P);
        j["Psi"] = mat(a.Psi);
        j["residuals"] = residual_map(a.residuals);
        j["worst_residual"] = a.worst_residual();
    }
    j["certified"] = a.feasible() && a.worst_residual() <= kResidualTolerance;
    return j;
}

bool certified(const AnalysisResult& a) { return a.feasible() && a.worst_residual() <= kResidualTolerance; }

json consensus_json(const SimulationTrace& tr) {
    const double e0 = tr.consensus_error.front();
    const double e1 = tr.consensus_error.back();
    const double rel = e0 > 0.0 ? e1 / e0 : (e1 > 0.0 ? INFINITY : 0.0);
    return {{"initial", e0}, {"final", e1}, {"relative", rel}, {"horizon", tr.times.back()},
            {"pass", rel <= kConsensusTolerance}};
}

json lyapunov_json(const LyapunovAudit& a) {
    json j = {{"pass", a.pass}, {"worst_ratio", a.worst_ratio}};
    if (!a.pass) {
        j["first_violation"] = a.first_violation;
        j["violation_time"] = a.violation_time;
    }
    return j;
}

json constraint_json(const ConstraintAudit& a, std::optional<double> limit) {
    json j = {{"max_abs_y", a.max_abs_y}, {"max_abs_z", a.max_abs_z}, {"sector_ok", a.sector_ok}};
    if (limit) {
        j["limit"] = *limit;
        j["within_limit"] = a.within_limit;
    }
    json ch = json::array();
    for (const auto& c : a.channels) {
        ch.push_back({{"max_abs_y", c.max_abs_y}, {"max_abs_z", c.max_abs_z},
                      {"max_sector_product", c.max_sector_product}});
    }
    j["channels"] = ch;
    return j;
}

std::optional<double> saturation_limit(const RunConfig& c) {
    if (c.sector && c.sector->channel.kind == ChannelKind::Saturation) return c.sector->channel.limit;
    return std::nullopt;
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.output.directory); }

bool wants(const RunConfig& c, const std::string& fmt) {
    return std::find(c.output.formats.begin(), c.output.formats.end(), fmt) != c.output.formats.end();
}

json trace_json(const SimulationTrace& tr, int stride) {
    json j;
    json t = json::array(), x = json::array(), z = json::array(), y = json::array(), u = json::array(),
         V = json::array(), ce = json::array();
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    for (std::size_t s : sample_rows(tr.size(), stride)) {
        t.push_back(tr.times[s]);
        x.push_back(vec(tr.x[s]));
        z.push_back(vec(tr.z[s]));
        y.push_back(vec(tr.y[s]));
        u.push_back(vec(tr.u[s]));
        if (!tr.V.empty()) V.push_back(tr.V[s]);
        ce.push_back(tr.consensus_error[s]);
    }
    return {{"t", t}, {"x", x}, {"z", z}, {"y", y}, {"u", u}, {"V", V}, {"consensus_error", ce}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) config_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Writes a trace in the requested format and returns the file name used.
std::string write_trace(const RunConfig& c, const CommandOptions& opts, const std::string& stem,
                        const SimulationTrace& tr) {
    if (!opts.write_files) return {};
    ensure_dir(out_dir(c));
    if (opts.format == "json") {
        const auto path = out_dir(c) / (stem + ".json");
        std::ofstream os(path);
        os << trace_json(tr, c.output.stride).dump() << '\n';
        return path.filename().string();
    }
    const auto path = out_dir(c) / (stem + ".csv");
    std::ofstream os(path);
    write_csv(os, tr, c.output.stride);
    return path.filename().string();
}

void finish(const RunConfig& c, const CommandOptions& opts, json& report) {
    if (!opts.write_files || !wants(c, "json")) return;
    ensure_dir(out_dir(c));
    std::ofstream os(out_dir(c) / "report.json");
    os << report.dump(2) << '\n';
}

Vector initial_state(const RunConfig& c) {
    const auto& x0 = config_simulation(c).x0;
    return Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
}

struct SimOutcome {
    SimulationTrace trace;
    json report;
    bool pass = false;
};

// Simulates one gain, audits consensus, channels and (when certified) Lyapunov decay.
SimOutcome simulate_gain(const AgentDynamics& agents, const Network& net, const Matrix& K,
                         const ChannelBank& bank, const Vector& x0, const SimulationSection& sim,
                         const std::optional<Matrix>& P, double eps, std::optional<double> limit,
                         const std::optional<SectorBounds>& bounds) {
    SimOutcome out;
    out.trace = simulate(agents, net.mats, net.spectral, K, bank, x0, sim.horizon, sim.step, P);
    const json cons = consensus_json(out.trace);
    const ConstraintAudit ca = constraint_audit(out.trace, limit, bounds);
    out.report = {{"K", mat(K)}, {"consensus", cons}, {"constraints", constraint_json(ca, limit)}};
    out.pass = cons["pass"].get<bool>() && ca.within_limit;
    if (P) {
        const LyapunovAudit la = lyapunov_audit(out.trace, net.spectral, *P, eps);
        out.report["lyapunov"] = lyapunov_json(la);
        out.pass = out.pass && la.pass;
    }
    return out;
}

}  // namespace

RunConfig apply_overrides(RunConfig c, const CommandOptions& opts) {
    if (opts.out) c.output.directory = *opts.out;
    if (opts.seed) {
        if (!c.sector) config_error("--seed needs a sector section");
        c.sector->seed = *opts.seed;
    }
    if (opts.eps) {
        if (!c.synthesis) c.synthesis = SynthesisSection{};
        c.synthesis->epsilon = *opts.eps;
    }
    if (opts.step || opts.horizon) {
        if (!c.simulation) config_error("--step/--horizon need a simulation section");
        if (opts.step) c.simulation->step = *opts.step;
        if (opts.horizon) c.simulation->horizon = *opts.horizon;
    }
    if (opts.format != "csv" && opts.format != "json") config_error("--format must be csv or json");
    return c;
}

json error_report(const std::exception& e) {
    json j = {{"status", "error"}, {"message", e.what()}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) j["error"] = to_string(err->code());
    return j;
}

int exit_code_for(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return kExitNumeric;
    switch (err->code()) {
        case ErrorCode::Infeasible:
        case ErrorCode::NoneFeasible: return kExitFail;
        case ErrorCode::NumericalFailure:
        case ErrorCode::SingularX:
        case ErrorCode::NonFiniteState: return kExitNumeric;
        default: return kExitConfig;
    }
}

CommandResult run_spectrum(const RunConfig& c, const CommandOptions& opts) {
    const NetworkGraph g = config_graph(c);
    if (!g.connected) config_error("graph not connected");
    const GraphMatrices mats = graph_matrices(g);
    const SpectralData sd = spectral_data(mats);
    json report = {{"command", "spectrum"},
                   {"status", "ok"},
                   {"nodes", g.node_count},
                   {"edges", g.edge_count()},
                   {"spanning_tree", g.is_spanning_tree()},
                   {"lambda", std::vector<double>(sd.lambda.data(), sd.lambda.data() + sd.lambda.size())},
                   {"lambda2", sd.lambda2()},
                   {"lambda_max", sd.lambda_max()},
                   {"Gamma", mat(sd.Gamma)},
                   {"lbar_spectrum_error", sd.lbar_spectrum_error},
                   {"edge_spectrum_error", sd.edge_spectrum_error},
                   {"spectral_checks_pass", sd.lbar_spectrum_error <= 1e-8 && sd.edge_spectrum_error <= 1e-8}};
    finish(c, opts, report);
    return {kExitPass, report};
}

CommandResult run_synthesize(const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const auto& syn = config_synthesis(c);
    double eps = 0.0;
    json eps_report;
    if (syn.epsilon) {
        eps = *syn.epsilon;
    } else if (syn.epsilon_range) {
        SynthesisProblem probe = problem_of(c, net, syn.epsilon_range->first);
        eps = max_epsilon(probe, syn.epsilon_range->first, syn.epsilon_range->second);
        eps_report = {{"range", {syn.epsilon_range->first, syn.epsilon_range->second}}, {"max_epsilon", eps}};
    } else {
        config_error("synthesis section needs epsilon or epsilon_range");
    }
    const SynthesisProblem problem = problem_of(c, net, eps);
    const SynthesisResult r = solve(problem);
    json report = {{"command", "synthesize"},
                   {"variant", to_string(problem.variant)},
                   {"epsilon", eps},
                   {"lambda2", problem.lambda2},
                   {"lambda_max", problem.lambda_max},
                   {"warnings", problem.agents.assumption_warnings()},
                   {"synthesis", synthesis_json(r)}};
    if (!eps_report.is_null()) report["epsilon_search"] = eps_report;
    bool pass = r.feasible();
    if (pass) {
        const VerificationReport v = verify_synthesis(r, problem, net.spectral.nonzero_eigenvalues());
        report["verification"] = verification_json(v);
        pass = v.pass(kResidualTolerance) && r.worst_residual() <= kResidualTolerance;
    }
    report["status"] = pass ? "pass" : "fail";
    finish(c, opts, report);
    return {pass ? kExitPass : kExitFail, report};
}

CommandResult run_analyze(const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const SynthesisProblem problem = problem_of(c, net, epsilon_of(c));
    const Matrix K = gain_of(c);
    const AnalysisResult a = analyze_fixed_gain(K, problem);
    json report = {{"command", "analyze"}, {"K", mat(K)}, {"epsilon", problem.epsilon},
                   {"analysis", analysis_json(a)}};
    const bool pass = certified(a);
    report["status"] = pass ? "pass" : "fail";
    finish(c, opts, report);
    return {pass ? kExitPass : kExitFail, report};
}

CommandResult run_simulate(const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const SimulationSection& sim = config_simulation(c);
    const SynthesisProblem problem = problem_of(c, net, epsilon_of(c));
    Matrix K;
    json report = {{"command", "simulate"}};
    if (config_synthesis(c).gain) {
        K = gain_of(c);
    } else {
        const SynthesisResult r = solve(problem);
        report["synthesis"] = synthesis_json(r);
        if (!r.feasible()) throw Error(ErrorCode::Infeasible, "synthesis infeasible; no gain to simulate");
        K = r.K;
    }
    const AnalysisResult a = analyze_fixed_gain(K, problem);
    report["analysis"] = analysis_json(a);
    const std::optional<Matrix> P = certified(a) ? std::optional<Matrix>(a.P) : std::nullopt;
    const ChannelBank bank = config_bank(c, net.graph.edge_count(), problem.agents.n());
    SimOutcome o = simulate_gain(problem.agents, net, K, bank, initial_state(c), sim, P, problem.epsilon,
                                 saturation_limit(c), problem.bounds);
    report["simulation"] = o.report;
    report["trace"] = write_trace(c, opts, "trace", o.trace);
    report["status"] = o.pass ? "pass" : "fail";
    finish(c, opts, report);
    return {o.pass ? kExitPass : kExitFail, report};
}

CommandResult run_verify(const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const SynthesisProblem problem = problem_of(c, net, epsilon_of(c));
    const Matrix K = gain_of(c);
    const AnalysisResult a = analyze_fixed_gain(K, problem);
    json report = {{"command", "verify"}, {"K", mat(K)}, {"analysis", analysis_json(a)}};
    bool pass = certified(a);
    if (c.simulation) {
        const ChannelBank bank = config_bank(c, net.graph.edge_count(), problem.agents.n());
        const std::optional<Matrix> P = pass ? std::optional<Matrix>(a.P) : std::nullopt;
        try {
            SimOutcome o = simulate_gain(problem.agents, net, K, bank, initial_state(c), *c.simulation, P,
                                         problem.epsilon, saturation_limit(c), problem.bounds);
            report["simulation"] = o.report;
            report["trace"] = write_trace(c, opts, "trace", o.trace);
            pass = pass && o.pass;
        } catch (const DivergenceError& e) {
            report["simulation"] = {{"diverged", true}, {"message", e.what()}};
            pass = false;
        }
    }
    report["status"] = pass ? "pass" : "fail";
    finish(c, opts, report);
    return {pass ? kExitPass : kExitFail, report};
}

Scenario parse_scenario(const std::string& s) {
    if (s == "robots") return Scenario::Robots;
    if (s == "oscillators-constrained") return Scenario::OscillatorsConstrained;
    if (s == "oscillators-uncertain") return Scenario::OscillatorsUncertain;
    config_error("unknown scenario '" + s + "'");
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Robots: return "robots";
        case Scenario::OscillatorsConstrained: return "oscillators-constrained";
        case Scenario::OscillatorsUncertain: return "oscillators-uncertain";
    }
    return "?";
}

RunConfig default_config(Scenario s) {
    RunConfig c;
    c.graph.nodes = 3;
    c.graph.edges = {{1, 2}, {2, 3}, {1, 3}};
    c.output.stride = 10;
    c.output.directory = std::string("out/") + to_string(s);
    SectorSection sec;
    SynthesisSection syn;
    SimulationSection sim;
    sim.step = 1e-3;
    switch (s) {
        case Scenario::Robots:
            c.agent = AgentSection{{{0.0}}, {{1.0}}};
            sec.channel.kind = ChannelKind::Saturation;
            sec.channel.limit = 3.0;
            sec.operating_bound = 4.0;
            syn.epsilon = 0.4;
            syn.gain = std::vector<std::vector<double>>{{-0.1}};
            sim.x0 = {0.0, 0.0, 0.0, 4.0, 1.0, std::numbers::pi / 2, 1.0, 4.0, std::numbers::pi};
            sim.horizon = 40.0;
            c.robot = RobotSection{2.0};
            break;
        case Scenario::OscillatorsConstrained:
            c.agent = AgentSection{{{0.0, 1.0}, {-1.0, 0.0}}, {{0.0}, {1.0}}};
            sec.channel.kind = ChannelKind::Saturation;
            sec.channel.limit = 2.0;
            sec.operating_bound = 5.0;
            syn.epsilon = 0.1;
            syn.gain = std::vector<std::vector<double>>{{-2.3825, -20.68}};
            sim.x0 = {1.0, -2.0, -3.0, 1.0, 4.0, -3.0};
            sim.horizon = 120.0;
            break;
        case Scenario::OscillatorsUncertain:
            c.agent = AgentSection{{{0.0, 1.0}, {-1.0, 0.0}}, {{0.0}, {1.0}}};
            sec.sigma1 = {0.7};
            sec.sigma2 = {1.3};
            sec.channel.kind = ChannelKind::StaticGain;
            sec.channel.gains = {1.2789, 0.7946};
            sec.channel.gain_range = std::make_pair(0.7, 1.3);
            sec.seed = 2024;
            syn.epsilon = 0.1;
            syn.gain = std::vector<std::vector<double>>{{-1.1309, -2.2191}};
            sim.x0 = {1.0, -2.0, -3.0, 1.0, 4.0, -3.0};
            sim.horizon = 120.0;
            break;
    }
    syn.variant = Variant::ScalarSector;
    c.sector = sec;
    c.synthesis = syn;
    c.simulation = sim;
    return c;
}

namespace {

CommandResult reproduce_robots(const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const SynthesisProblem scalar = problem_of(c, net, epsilon_of(c));
    if (scalar.agents.n() != 1 || scalar.agents.m() != 1) {
        config_error("robot reproduction expects the per-axis scalar agent (n = m = 1)");
    }
    if (!c.robot) config_error("robot reproduction needs a robot section");
    const double eps = scalar.epsilon;
    const double s1 = scalar.bounds.sigma1().front();
    const double s2 = scalar.bounds.sigma2().front();
    const double k = gain_of(c)(0, 0);
    const double lower = -eps / (scalar.lambda2 * s2);

    json report = {{"scenario", "robots"}, {"epsilon", eps}, {"lambda2", scalar.lambda2},
                   {"sigma1", s1}, {"sigma2", s2}, {"reference_gain", k}};
    const bool inside = lower < k && k < 0.0;
    report["formula_interval"] = {{"lower", lower}, {"upper", 0.0}, {"contains_reference_gain", inside}};

    const GainInterval lmi = admissible_scalar_gains(scalar);
    const bool lmi_ok = k >= lmi.lower && k <= lmi.upper;
    report["lmi_interval"] = {{"lower", lmi.lower}, {"upper", lmi.upper}, {"contains_reference_gain", lmi_ok}};

    const SynthesisResult ours = solve(scalar);
    report["synthesis"] = synthesis_json(ours);
    bool synth_ok = ours.feasible();
    if (synth_ok) {
        const VerificationReport v = verify_synthesis(ours, scalar, net.spectral.nonzero_eigenvalues());
        report["verification"] = verification_json(v);
        synth_ok = v.pass(kResidualTolerance);
    }

    // Per-axis problem on the heading points: A = 0, B = I2, K = k I2.
    SynthesisProblem planar = scalar;
    planar.agents = AgentDynamics(Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    planar.bounds = SectorBounds::scalar(2, s1, s2);
    const Matrix K2 = k * Matrix::Identity(2, 2);
    const AnalysisResult a = analyze_fixed_gain(K2, planar);
    report["analysis"] = analysis_json(a);

    const auto& sim = config_simulation(c);
    std::vector<RobotState> poses;
    for (int i = 0; i < net.graph.node_count; ++i) {
        poses.push_back({sim.x0[3 * i], sim.x0[3 * i + 1], sim.x0[3 * i + 2]});
    }
    const ChannelBank bank = config_bank(c, net.graph.edge_count(), 2);
    RobotTrace tr = simulate_robots(net.mats, K2, bank, poses, c.robot->r, sim.horizon, sim.step);

    const json cons = consensus_json(tr.points);
    const auto limit = saturation_limit(c);
    const ConstraintAudit ca = constraint_audit(tr.points, limit, planar.bounds);
    json simr = {{"consensus", cons}, {"constraints", constraint_json(ca, limit)}};
    bool lyap_ok = true;
    if (certified(a)) {
        for (std::size_t s = 0; s < tr.points.size(); ++s) {
            tr.points.V.push_back(lyapunov_value(tr.points.z[s], net.spectral, a.P));
        }
        const LyapunovAudit la = lyapunov_audit(tr.points, net.spectral, a.P, eps);
        simr["lyapunov"] = lyapunov_json(la);
        lyap_ok = la.pass;
    }

    double recovery = 0.0;
    for (std::size_t s = 0; s < tr.points.size(); ++s) {
        for (int i = 0; i < net.graph.node_count; ++i) {
            if (std::abs(tr.v[s](i)) < 1e-6) continue;
            const Eigen::Vector2d u = tr.points.u[s].segment<2>(2 * i);
            const Eigen::Vector2d back =
                reconstruct_input(tr.theta[s](i), c.robot->r, {tr.v[s](i), tr.steer[s](i)});
            recovery = std::max(recovery, (u - back).norm() / std::max(1.0, u.norm()));
        }
    }
    simr["input_recovery_error"] = recovery;
    report["simulation"] = simr;

    if (opts.write_files) {
        ensure_dir(out_dir(c));
        std::ofstream os(out_dir(c) / "robots.csv");
        write_robot_csv(os, tr, c.output.stride);
        report["trace"] = "robots.csv";
    }
    const bool pass = inside && lmi_ok && synth_ok && certified(a) && cons["pass"].get<bool>() &&
                      ca.within_limit && lyap_ok;
    report["status"] = pass ? "pass" : "fail";
    finish(c, opts, report);
    return {pass ? kExitPass : kExitFail, report};
}

CommandResult reproduce_oscillators(Scenario scenario, const RunConfig& c, const CommandOptions& opts) {
    const Network net = network(c);
    const SynthesisProblem problem = problem_of(c, net, epsilon_of(c));
    const Matrix K_ref = gain_of(c);
    const auto& sim = config_simulation(c);
    const Vector x0 = initial_state(c);
    const int n = problem.agents.n();
    const int M = net.graph.edge_count();

    json report = {{"scenario", to_string(scenario)}, {"epsilon", problem.epsilon},
                   {"lambda2", problem.lambda2}, {"lambda_max", problem.lambda_max},
                   {"sigma1", problem.bounds.sigma1()}, {"sigma2", problem.bounds.sigma2()},
                   {"variant", to_string(problem.variant)}};

    const SynthesisResult ours = solve(problem);
    report["synthesis"] = synthesis_json(ours);
    bool pass = ours.feasible();
    if (pass) {
        const VerificationReport v = verify_synthesis(ours, problem, net.spectral.nonzero_eigenvalues());
        report["verification"] = verification_json(v);
        pass = v.pass(kResidualTolerance);
    }

    struct Candidate {
        std::string name;
        Matrix K;
        AnalysisResult analysis;
    };
    std::vector<Candidate> gains;
    gains.push_back({"reference", K_ref, analyze_fixed_gain(K_ref, problem)});
    if (ours.feasible()) gains.push_back({"synthesized", ours.K, analyze_fixed_gain(ours.K, problem)});
    for (const auto& g : gains) {
        report["analysis_" + g.name] = analysis_json(g.analysis);
        pass = pass && certified(g.analysis);
    }

    const auto limit = saturation_limit(c);
    if (scenario == Scenario::OscillatorsConstrained) {
        const ChannelBank bank = config_bank(c, M, n);
        for (const auto& g : gains) {
            const auto P = certified(g.analysis) ? std::optional<Matrix>(g.analysis.P) : std::nullopt;
            SimOutcome o = simulate_gain(problem.agents, net, g.K, bank, x0, sim, P, problem.epsilon, limit,
                                         problem.bounds);
            if (c.sector->operating_bound) {
                o.report["operating_bound"] = *c.sector->operating_bound;
                o.report["within_operating_bound"] =
                    o.report["constraints"]["max_abs_z"].get<double>() <= *c.sector->operating_bound;
            }
            o.report["trace"] = write_trace(c, opts, "trace_" + g.name, o.trace);
            report["simulation_" + g.name] = o.report;
            pass = pass && o.pass;
        }
    } else {
        const auto& ch = c.sector->channel;
        if (ch.kind != ChannelKind::StaticGain || ch.gains.empty() || !ch.gain_range) {
            config_error("uncertain reproduction needs static_gain channel gains and gain_range");
        }
        std::vector<std::pair<std::string, ChannelBank>> draws;
        std::vector<double> pair = ch.gains;
        if (pair.size() == 1) pair.assign(static_cast<std::size_t>(n), pair.front());
        draws.emplace_back("reference_pair", ChannelBank::component_gains(M, pair));
        for (int i = 1; i < kUncertainDraws; ++i) {
            draws.emplace_back("seed_" + std::to_string(c.sector->seed + static_cast<std::uint64_t>(i)),
                               ChannelBank::random_gains(M, n, ch.gain_range->first, ch.gain_range->second,
                                                         c.sector->seed + static_cast<std::uint64_t>(i)));
        }
        for (const auto& g : gains) {
            const auto P = certified(g.analysis) ? std::optional<Matrix>(g.analysis.P) : std::nullopt;
            json runs = json::array();
            bool all = true;
            for (std::size_t d = 0; d < draws.size(); ++d) {
                SimOutcome o = simulate_gain(problem.agents, net, g.K, draws[d].second, x0, sim, P,
                                             problem.epsilon, std::nullopt, problem.bounds);
                std::vector<double> gv;
                for (const auto& chan : draws[d].second.channels) gv.push_back(chan.gain());
                o.report["draw"] = draws[d].first;
                o.report["gains"] = gv;
                o.pass = o.pass && o.report["constraints"]["sector_ok"].get<bool>();
                if (d == 0) o.report["trace"] = write_trace(c, opts, "trace_" + g.name, o.trace);
                all = all && o.pass;
                runs.push_back(o.report);
            }
            report["simulation_" + g.name] = {{"runs", runs}, {"all_pass", all}};
            pass = pass && all;
        }
    }
    report["status"] = pass ? "pass" : "fail";
    finish(c, opts, report);
    return {pass ? kExitPass : kExitFail, report};
}

}  // namespace

CommandResult run_reproduce(Scenario s, const RunConfig& c, const CommandOptions& opts) {
    if (s == Scenario::Robots) return reproduce_robots(c, opts);
    return reproduce_oscillators(s, c, opts);
}

}  // namespace relcon
