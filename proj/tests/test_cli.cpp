#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hyobs/cli/benchmark.hpp"
#include "hyobs/cli/commands.hpp"
#include "hyobs/cli/config.hpp"
#include "hyobs/cli/report.hpp"

using namespace hyobs;
using namespace hyobs::cli;

namespace {

const char* kOscillator = R"({
  "plant": {"A": [[0.2, -1.01], [1, 0]], "C": [[0.5, -1]]},
  "timing": {"T1": 0.5, "T2": 0.6},
  "design": {"alpha1": 100, "alpha2": 1, "delta": 0.03, "eta": 0.0001},
  "simulation": {
    "initial": {"z": [10, 0], "zhat": [0, 0], "theta": [5], "tau": 0},
    "horizon": 10,
    "sampling": {"policy": "sinusoidal"}
  }
})";

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hyobs_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "hyobs");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::string config_error_field(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("config parsing") {
    ProblemConfig c = parse_config_text(kOscillator);
    CHECK(c.plant.nz() == 2);
    CHECK(c.plant.ny() == 1);
    CHECK(c.timing.T2() == 0.6);
    CHECK(c.design.QF.isApprox(Matrix::Identity(2, 2)));
    CHECK(c.design.QJ.isApprox(0.01 * Matrix::Identity(2, 2)));
    CHECK(*c.design.delta == 0.03);
    CHECK_FALSE(c.design.has_grid());
    REQUIRE(c.simulation);
    CHECK(c.simulation->sampling.kind == SamplingPolicy::Kind::sinusoidal);
    CHECK(*c.simulation->sampling.first_sample == 0.0);

    SUBCASE("missing design values fall back to grids") {
        ProblemConfig g = parse_config_text(
            R"({"plant": {"A": [[-1]], "C": [[1]]}, "timing": {"T1": 0.5, "T2": 1}, "design": {"delta": 0.1}})");
        CHECK(g.design.delta);
        CHECK(g.design.eta_grid.size() == 8);
        CHECK(g.design.has_grid());
    }
}

TEST_CASE("config errors name the field") {
    CHECK(config_error_field(R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1.2, "T2": 1.1}})") ==
          "/timing");
    CHECK(config_error_field(R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2}, "extra": 1})") ==
          "/extra");
    CHECK(config_error_field(R"({"plant": {"A": [[1, 2]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2}})") == "/plant");
    CHECK(config_error_field(R"({"plant": {"A": [[1, 2], [3]], "C": [[1, 1]]}, "timing": {"T1": 1, "T2": 2}})") ==
          "/plant/A/1");
    CHECK(config_error_field(R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1}})") == "/timing/T2");
    CHECK(config_error_field(
              R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2}, "design": {"Q_F": [[1, 0], [0, 1]]}})") ==
          "/design/Q_F");
    CHECK(config_error_field(
              R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2}, "design": {"alpha1": "big"}})") ==
          "/design/alpha1");
    CHECK(config_error_field(
              R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2}, "design": {"delta": 1, "delta_grid": [1]}})") ==
          "/design/delta_grid");
    CHECK(config_error_field(R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2},
        "simulation": {"initial": {"eps": [1], "theta_tilde": [0]}, "horizon": 5, "sampling": {"policy": "bursty"}}})") ==
          "/simulation/sampling/policy");
    CHECK(config_error_field(R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 1, "T2": 2},
        "simulation": {"initial": {"eps": [1, 2], "theta_tilde": [0]}, "horizon": 5, "sampling": {"policy": "sinusoidal"}}})") ==
          "/simulation/initial/eps");
    CHECK(config_error_field("{\"plant\": ") == "");
}

TEST_CASE("config round trip") {
    const std::vector<std::string> docs = {
        kOscillator,
        R"({"plant": {"A": [[-1]], "C": [[1]]}, "timing": {"T1": 0.5, "T2": 1}})",
        R"({"plant": {"A": [[-1]], "C": [[1]]}, "timing": {"T1": 0.5, "T2": 1},
            "design": {"Q_F": [[2]], "Q_J": [[0.5]], "delta_grid": [0.1, 0.2], "eta": 0.3},
            "simulation": {"initial": {"eps": [1], "theta_tilde": [0]}, "horizon": 5,
                           "sampling": {"policy": "uniform_random"}, "seed": 99, "dense_points": 17}})",
        R"({"plant": {"A": [[-1]], "C": [[1]]}, "timing": {"T1": 0.5, "T2": 1},
            "simulation": {"initial": {"eps": [1], "theta_tilde": [0], "tau": 0.5}, "horizon": 2,
                           "sampling": {"policy": "explicit", "times": [0.5, 1.2, 2.0]}}})",
        R"({"plant": {"A": [[-1]], "C": [[1]]}, "timing": {"T1": 0.5, "T2": 1},
            "simulation": {"initial": {"eps": [0.1], "theta_tilde": [0.2]}, "horizon": 2,
                           "sampling": {"policy": "periodic", "period": 0.75}}})",
    };
    for (const auto& text : docs) {
        const Json once = to_json(parse_config_text(text));
        const Json twice = to_json(parse_config(once));
        CHECK(once.dump() == twice.dump());
    }
}

TEST_CASE("gains files") {
    ProblemConfig c = parse_config_text(kOscillator);
    GainsFile g = parse_gains(Json::parse(R"({"L": [[3.68], [-24.47]], "H": [[-11.47]], "F": [[0.04], [-0.364]]})"),
                              c.plant);
    CHECK(g.gains.L()(1, 0) == -24.47);
    CHECK_FALSE(g.certificate);
    CHECK_THROWS_AS(parse_gains(Json::parse(R"({"L": [[1, 2]], "H": [[0]], "F": [[0], [0]]})"), c.plant), ConfigError);

    GainsFile with_cert{g.gains, LyapunovCertificate(Matrix::Identity(2, 2), Matrix::Ones(1, 1), 0.1, 0.01)};
    GainsFile back = parse_gains(to_json(with_cert), c.plant);
    REQUIRE(back.certificate);
    CHECK(back.certificate->eta() == 0.01);
    CHECK(to_json(back).dump() == to_json(with_cert).dump());
}

TEST_CASE("design command") {
    auto dir = scratch("design");
    const std::string cfg = write(dir / "config.json", kOscillator);
    std::string out;
    CHECK(invoke({"design", "--config", cfg, "--out", (dir / "out").string()}, &out) == kExitOk);
    Json report = read_json_file((dir / "out" / "report.json").string());
    CHECK(report["status"] == "optimal");
    CHECK(report["tool"]["version"] == kToolVersion);
    CHECK(report["result"]["reverification"]["feasible"] == true);
    CHECK(report["config"].dump() == to_json(parse_config_text(kOscillator)).dump());

    SUBCASE("gains file feeds verify and simulate") {
        const std::string gains = (dir / "out" / "gains.json").string();
        CHECK(invoke({"verify", "--config", cfg, "--gains", gains, "--out", (dir / "verify").string()}) == kExitOk);
        Json v = read_json_file((dir / "verify" / "report.json").string());
        CHECK(v["best"]["report"]["feasible"] == true);

        CHECK(invoke({"simulate", "--config", cfg, "--gains", gains, "--out", (dir / "sim").string()}) == kExitOk);
        Json s = read_json_file((dir / "sim" / "report.json").string());
        CHECK(s["simulation"]["lyapunov_monotonicity"]["passed"] == true);
        CHECK(s["simulation"]["envelope"]["lambda"].get<double>() > 0.0);
        CHECK(s["simulation"]["cost_within_bound"] == true);
        CHECK(std::filesystem::exists(dir / "sim" / "arc.csv"));
        CHECK(std::filesystem::exists(dir / "sim" / "jumps.csv"));
    }
}

TEST_CASE("exit statuses") {
    auto dir = scratch("status");
    SUBCASE("unobservable plant over a grid is infeasible") {
        const std::string cfg = write(dir / "c.json", R"({"plant": {"A": [[1]], "C": [[0]]},
            "timing": {"T1": 0.5, "T2": 1}, "design": {"delta_grid": [0.01, 0.1], "eta_grid": [0.001]}})");
        CHECK(invoke({"design", "--config", cfg, "--out", (dir / "o").string()}) == kExitInfeasible);
        Json r = read_json_file((dir / "o" / "report.json").string());
        CHECK(r["grid"].size() == 2);
        CHECK(r["result"].is_null());
    }
    SUBCASE("zero gains on an unstable plant do not verify") {
        const std::string cfg = write(dir / "c.json", R"({"plant": {"A": [[0.2, -1.01], [1, 0]], "C": [[0.5, -1]]},
            "timing": {"T1": 0.5, "T2": 1.1}, "design": {"delta": 0.03, "eta": 0.0001}})");
        const std::string gains = write(dir / "g.json", R"({"L": [[0], [0]], "H": [[0]], "F": [[0], [0]]})");
        CHECK(invoke({"verify", "--config", cfg, "--gains", gains, "--out", (dir / "o").string()}) == kExitInfeasible);
    }
    SUBCASE("parse errors and usage errors") {
        const std::string cfg = write(dir / "c.json", R"({"plant": {"A": [[1]], "C": [[1]]}, "timing": {"T1": 2, "T2": 1}})");
        std::string err;
        CHECK(invoke({"design", "--config", cfg, "--out", (dir / "o").string()}, nullptr, &err) == kExitUsage);
        CHECK(err.find("/timing") != std::string::npos);
        CHECK(invoke({"design"}) == kExitUsage);
        CHECK(invoke({"frobnicate"}) == kExitUsage);
        CHECK(invoke({"simulate", "--config", cfg}) == kExitUsage);
    }
    SUBCASE("simulate from the attractor writes zero error columns") {
        const std::string cfg = write(dir / "c.json", R"({"plant": {"A": [[0.2, -1.01], [1, 0]], "C": [[0.5, -1]]},
            "timing": {"T1": 0.5, "T2": 1.1},
            "simulation": {"initial": {"eps": [0, 0], "theta_tilde": [0]}, "horizon": 5,
                           "sampling": {"policy": "sinusoidal"}}})");
        const std::string gains = write(dir / "g.json", R"({"L": [[0], [0]], "H": [[0]], "F": [[0.183], [-0.333]]})");
        CHECK(invoke({"simulate", "--config", cfg, "--gains", gains, "--out", (dir / "o").string()}) == kExitOk);
        std::ifstream in(dir / "o" / "arc.csv");
        std::string line;
        std::getline(in, line);
        int rows = 0;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            REQUIRE(cells.size() == 7);
            CHECK(cells[2] == "0");
            CHECK(cells[3] == "0");
            CHECK(cells[4] == "0");
            CHECK(cells[6] == "0");
            ++rows;
        }
        CHECK(rows > 0);
        Json r = read_json_file((dir / "o" / "report.json").string());
        CHECK(r["simulation"]["envelope"].is_null());
        CHECK(r["simulation"]["cost"]["total"] == 0.0);
    }
}

TEST_CASE("benchmark data") {
    ProblemConfig c = benchmark_config();
    CHECK(c.plant.A()(0, 1) == -1.01);
    CHECK(c.timing.T1() == 0.5);
    CHECK(c.timing.T2() == 1.1);
    CHECK(benchmark_case("III").reference.F()(1, 0) == -0.364);
    CHECK(*benchmark_case("II").reference_trace_P1 == 354.7);
    CHECK_THROWS_AS(benchmark_case("VI"), InvalidInput);
    const Json once = to_json(c);
    CHECK(to_json(parse_config(once)).dump() == once.dump());
}
