#include <doctest.h>

#include "relcon/commands.hpp"
#include "relcon/config.hpp"
#include "relcon/error.hpp"

using namespace relcon;
using nlohmann::json;

namespace {

ErrorCode code_of(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::NumericalFailure;
}

}  // namespace

TEST_CASE("shipped configs round-trip and match the embedded defaults") {
    for (const char* name : {"robots", "oscillators-constrained", "oscillators-uncertain"}) {
        const RunConfig file = load_config(std::string(RELCON_CONFIG_DIR) + "/" + name + ".json");
        const json once = to_json(file);
        CHECK(to_json(parse_config(once)) == once);
        CHECK(once == to_json(default_config(parse_scenario(name))));
    }
    for (const char* name : {"k3", "p3", "disconnected", "robot-scalar"}) {
        const RunConfig c = load_config(std::string(RELCON_CONFIG_DIR) + "/" + name + ".json");
        CHECK(to_json(parse_config(to_json(c))) == to_json(c));
    }
}

TEST_CASE("numbers keep full double precision") {
    json j = to_json(default_config(Scenario::Robots));
    j["synthesis"]["epsilon"] = 0.1 + 0.2;
    const RunConfig c = parse_config(json::parse(j.dump()));
    CHECK(*c.synthesis->epsilon == 0.1 + 0.2);
}

TEST_CASE("sector bounds from explicit values or the operating-bound rule") {
    RunConfig c = default_config(Scenario::Robots);
    const auto b = config_bounds(c, 1);
    CHECK(b.sigma1().front() == 0.75);
    CHECK(b.sigma2().front() == 1.0);
    c.sector->operating_bound.reset();
    CHECK_THROWS_AS(config_bounds(c, 1), Error);
    c.sector.reset();
    try {
        config_bounds(c, 1);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
    }
    const RunConfig u = default_config(Scenario::OscillatorsUncertain);
    CHECK(config_bounds(u, 2).is_scalar());
    CHECK(config_bank(u, 3, 2).channels.front().gain() != config_bank(u, 3, 2).channels.back().gain());
}

TEST_CASE("malformed configs raise config errors") {
    json base = to_json(default_config(Scenario::OscillatorsConstrained));
    json j = base;
    j.erase("graph");
    CHECK(code_of(j) == ErrorCode::Config);
    j = base;
    j["agent"]["A"] = {{0.0, 1.0}};
    CHECK(code_of(j) == ErrorCode::Config);
    j = base;
    j["simulation"]["x0"] = {1.0, 2.0};
    CHECK(code_of(j) == ErrorCode::Config);
    j = base;
    j["synthesis"]["gain"] = {{1.0}};
    CHECK(code_of(j) == ErrorCode::Config);
    j = base;
    j["sector"]["channel"]["kind"] = "cubic";
    CHECK(code_of(j) == ErrorCode::Config);
    j = base;
    j["graph"]["edges"] = "none";
    CHECK(code_of(j) == ErrorCode::Config);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}
