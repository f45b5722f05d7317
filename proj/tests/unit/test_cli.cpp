#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "../support.hpp"
#include "floquet/cli.hpp"
#include "json.hpp"

using namespace testsupport;

namespace {
struct Run {
    int code;
    std::string out, err;
};
Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = floquet::cli::run(args, o, e);
    return {c, o.str(), e.str()};
}
}  // namespace

TEST_CASE("fqpe trivial model gives 1/2, 1/2") {
    const Run r = run({"fqpe", "--config", config("trivial_sz.json"), "--mode", "sambe", "--eps", "1e-3", "--delta",
                       "1e-3", "--L", "2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["entries"].size() == 2);
    for (const auto& e : j["entries"]) CHECK(e["prob"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("verify rows and exit status") {
    const Run r = run({"verify", "--config", config("rabi.json"), "--checks", "prop1,prop2", "--L-sweep", "4:6",
                       "--steps", "20000"});
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "model_id,check_id,L,measured,bound,pass");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("errors exit 2") {
    CHECK(run({"fqpe", "--config", "/nonexistent.json"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"fqpe", "--config", config("rabi.json"), "--psi", "[1, 1]"}).code == 2);
    CHECK(run({"spectrum", "--config", config("rabi.json"), "--method", "magic"}).code == 2);
    CHECK(run({"cost", "--formula", "nope"}).code == 2);
}

TEST_CASE("cost CSV") {
    const Run r = run({"cost", "--formula", "thm3", "--alphaT", "1", "--eps", "0.1", "--delta", "0.1", "--nu", "0.1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string head, row;
    std::getline(in, head);
    std::getline(in, row);
    CHECK(row.rfind("thm3,", 0) == 0);
    const double want = (1 + std::log(100.0)) / 0.01 * std::log(10.0);
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 12);
    CHECK(std::stod(cells[8]) == doctest::Approx(want).epsilon(1e-14));
    CHECK(cells[3] == "0.10000000000000001");
}

TEST_CASE("spectrum output and determinism") {
    const std::vector<std::string> a{"spectrum", "--config", config("rabi.json"), "--L", "6", "--steps", "20000"};
    const Run r1 = run(a), r2 = run(a);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.find("max_distance,obc,pbc") != std::string::npos);
}

TEST_CASE("experiment config fills flags and rejects unknown keys") {
    const std::string dir = std::string(FLOQUET_BINARY_DIR);
    {
        std::ofstream f(dir + "/exp_ok.json");
        f << R"({"hamiltonian": ")" << config("trivial_sz.json") << R"(", "mode": "physical", "eps": 0.01})";
    }
    const Run ok = run({"fqpe", "--config", dir + "/exp_ok.json"});
    REQUIRE(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["diagnostics"]["method"] == "physical");
    {
        std::ofstream f(dir + "/exp_bad.json");
        f << R"({"hamiltonian": ")" << config("trivial_sz.json") << R"(", "bogus": 1})";
    }
    CHECK(run({"fqpe", "--config", dir + "/exp_bad.json"}).code == 2);
}

TEST_CASE("sweep is sorted and thread-count independent") {
    const std::vector<std::string> base{"sweep", "--config", config("rabi.json"), "--config", config("circular.json"),
                                        "--checks", "prop1", "--L-sweep", "4:7", "--steps", "20000"};
    auto a = base, b = base;
    a.insert(a.end(), {"--threads", "1"});
    b.insert(b.end(), {"--threads", "3"});
    const Run r1 = run(a), r3 = run(b);
    CHECK(r1.code == 0);
    CHECK(r1.out == r3.out);
    CHECK(r1.out.find("circular") < r1.out.find("rabi"));
}

TEST_CASE("blockenc and prepare") {
    const Run b = run({"blockenc", "--config", config("rabi.json"), "--L", "2"});
    REQUIRE(b.code == 0);
    const auto j = nlohmann::json::parse(b.out);
    CHECK(j["error"].get<double>() <= 1e-10 * j["alpha"].get<double>());
    const Run p = run({"prepare", "--config", config("trivial_sz.json"), "--eps-n", "-0.25", "--Delta", "0.4", "--gamma",
                       "0.7", "--psi", "plus", "--steps", "1000"});
    REQUIRE(p.code == 0);
    CHECK(nlohmann::json::parse(p.out)["fidelity"].get<double>() >= 1 - 1e-3);
    CHECK(run({"prepare", "--config", config("trivial_sz.json"), "--eps-n", "-0.25", "--Delta", "0.6", "--gamma", "0.7",
               "--steps", "1000"})
              .code == 2);
}
