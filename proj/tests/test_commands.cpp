#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "relcon/commands.hpp"

using namespace relcon;
namespace fs = std::filesystem;

namespace {

RunConfig shipped(const std::string& name) {
    return load_config(std::string(RELCON_CONFIG_DIR) + "/" + name + ".json");
}

CommandOptions quiet() {
    CommandOptions o;
    o.write_files = false;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("spectrum on the shipped graphs") {
    const auto k3 = run_spectrum(shipped("k3"), quiet());
    CHECK(k3.exit_code == kExitPass);
    CHECK(k3.report["lambda"][1].get<double>() == doctest::Approx(3.0));
    CHECK(k3.report["lambda"][2].get<double>() == doctest::Approx(3.0));
    const auto p3 = run_spectrum(shipped("p3"), quiet());
    CHECK(p3.report["lambda"][1].get<double>() == doctest::Approx(1.0));
    CHECK(p3.report["lambda"][2].get<double>() == doctest::Approx(3.0));
    const auto dc = guarded([&] { return run_spectrum(shipped("disconnected"), quiet()); });
    CHECK(dc.exit_code != kExitPass);
    CHECK(dc.report["message"].get<std::string>().find("graph not connected") != std::string::npos);
}

TEST_CASE("synthesize on the robot config reports K and small residuals") {
    const auto r = run_synthesize(shipped("robot-scalar"), quiet());
    CHECK(r.exit_code == kExitPass);
    CHECK(r.report["synthesis"].contains("K"));
    CHECK(r.report["synthesis"]["worst_residual"].get<double>() <= 1e-7);
    CHECK(r.report["verification"]["worst"].get<double>() <= 1e-7);
}

TEST_CASE("synthesize with an epsilon range searches for the largest rate") {
    RunConfig c = shipped("robot-scalar");
    c.synthesis->epsilon.reset();
    c.synthesis->epsilon_range = std::make_pair(0.05, 0.5);
    const auto r = run_synthesize(c, quiet());
    CHECK(r.exit_code == kExitPass);
    CHECK(r.report["epsilon_search"]["max_epsilon"].get<double>() > 0.0);
}

TEST_CASE("verify accepts the reference gain and rejects a tampered one") {
    CHECK(run_verify(shipped("robot-scalar"), quiet()).exit_code == kExitPass);
    RunConfig c = shipped("robot-scalar");
    c.synthesis->gain = std::vector<std::vector<double>>{{0.1}};
    const auto bad = guarded([&] { return run_verify(c, quiet()); });
    CHECK(bad.exit_code != kExitPass);
    c.synthesis->gain = std::vector<std::vector<double>>{{-0.05}};
    CHECK(guarded([&] { return run_verify(c, quiet()); }).exit_code != kExitPass);
}

TEST_CASE("simulate without a sector section is a config error") {
    RunConfig c = shipped("robot-scalar");
    c.sector.reset();
    const auto r = guarded([&] { return run_simulate(c, quiet()); });
    CHECK(r.exit_code == kExitConfig);
}

TEST_CASE("overrides") {
    CommandOptions o;
    o.eps = 0.2;
    o.horizon = 5.0;
    o.step = 0.01;
    o.seed = 99;
    o.out = "elsewhere";
    const RunConfig c = apply_overrides(default_config(Scenario::OscillatorsUncertain), o);
    CHECK(*c.synthesis->epsilon == 0.2);
    CHECK(c.simulation->horizon == 5.0);
    CHECK(c.simulation->step == 0.01);
    CHECK(c.sector->seed == 99);
    CHECK(c.output.directory == "elsewhere");
    o.format = "xml";
    CHECK_THROWS(apply_overrides(default_config(Scenario::Robots), o));
}

TEST_CASE("reproduction writes identical artifacts on repeated runs") {
    const fs::path root = fs::temp_directory_path() / "relcon_repro_test";
    fs::remove_all(root);
    CommandOptions o;
    std::string first;
    for (int run = 0; run < 2; ++run) {
        o.out = (root / std::to_string(run)).string();
        RunConfig c = apply_overrides(default_config(Scenario::Robots), o);
        const auto r = run_reproduce(Scenario::Robots, c, o);
        CHECK(r.exit_code == kExitPass);
        const std::string csv = slurp(root / std::to_string(run) / "robots.csv");
        CHECK(csv.size() > 1000);
        if (run == 0) first = csv;
        else CHECK(csv == first);
        CHECK(fs::exists(root / std::to_string(run) / "report.json"));
    }
    o.out = (root / "json").string();
    o.format = "json";
    RunConfig c = apply_overrides(default_config(Scenario::OscillatorsConstrained), o);
    c.simulation->horizon = 2.0;
    run_reproduce(Scenario::OscillatorsConstrained, c, o);
    CHECK(fs::exists(root / "json" / "trace_reference.json"));
    fs::remove_all(root);
}
