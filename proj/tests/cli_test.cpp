#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "blowup/io.hpp"
#include "blowup/run/commands.hpp"
#include "blowup/run/manifest.hpp"
#include "support.hpp"

using namespace blowup;
using blowup::run::run_cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Every test works in its own scratch directory.
struct Sandbox {
    fs::path dir = test::scratch_dir("cli");
    test::ChangeDir cd{dir};
    ~Sandbox() {
        fs::current_path(cd.previous);
        fs::remove_all(dir);
    }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
    Sandbox sb;
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"solve", "--n", "0.2", "--p", "1.2", "--family", "basic:0", "--eps", "-1"}).code == 1);
    CHECK(cli({"solve", "--n", "0.2", "--p", "1.2", "--bogus"}).code == 1);
    CHECK(cli({"solve", "--n", "0.2"}).code == 1);
    CHECK(cli({"solve", "--n", "0.2", "--p", "1.2", "--bc", "wall"}).code == 1);
    CHECK(cli({"solve", "--n", "0.2", "--p", "1.2", "--family", "glue_pp:1"}).code == 1);
    CHECK(cli({"branch", "--from-profile", "nope.csv", "--p-end", "1.3"}).code == 1);
    CHECK(cli({"kernel", "--L", "5"}).code == 1);
    CHECK(cli({"eigen", "--n", "-1"}).code == 1);
    CHECK(cli({"replay", "missing.manifest.json"}).code == 1);
}

TEST_CASE("help lists every flag and exits 0") {
    Sandbox sb;
    const auto r = cli({"solve", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--n", "--p", "--eps", "--eps-schedule", "--bc", "--family", "--template", "--R", "--N",
                             "--tol", "--max-iters", "--warm-start", "--out", "--name"})
        CHECK(r.out.find(flag) != std::string::npos);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("solve, classify, branch and replay") {
    Sandbox sb;
    auto r = cli({"solve", "--n", "0.2", "--p", "1.2", "--family", "basic:0", "--name", "f0"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists("out/f0.csv"));
    CHECK(fs::exists("out/f0.json"));
    CHECK(fs::exists("out/f0.manifest.json"));

    const auto m = run::RunManifest::read("out/f0.manifest.json");
    CHECK(m.command == "solve");
    CHECK(m.exit_code == 0);
    CHECK(m.version == run::kVersion);
    CHECK(m.parameters["n"] == 0.2);
    REQUIRE(m.outputs.size() >= 2);
    CHECK(m.outputs[0].sha256 == run::sha256_file(fs::path("out") / m.outputs[0].path));

    r = cli({"classify", "--profile", "out/f0.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("{+2}") != std::string::npos);
    CHECK(fs::exists("out/classification.json"));

    r = cli({"branch", "--from-profile", "out/f0.csv", "--p-end", "1.2"});
    CHECK(r.code == 1);

    r = cli({"branch", "--from-profile", "out/f0.csv", "--p-end", "1.24", "--dp", "0.02", "--save-profiles"});
    CHECK(r.code == 0);
    CHECK(fs::exists("out/branch.csv"));
    CHECK(fs::exists("out/branch.json"));
    const auto bm = run::RunManifest::read("out/branch.manifest.json");
    CHECK(bm.inputs.size() == 2);

    SUBCASE("replays are identical") {
        for (const char* man : {"out/f0.manifest.json", "out/classification.manifest.json", "out/branch.manifest.json"}) {
            const auto rr = cli({"replay", man});
            CHECK(rr.code == 0);
            CHECK(rr.out.find("replay: identical") != std::string::npos);
        }
    }
    SUBCASE("tampered input breaks the replay") {
        std::ofstream("out/f0.csv", std::ios::app) << "0,0\n";
        CHECK(cli({"replay", "out/classification.manifest.json"}).code == 2);
    }
    SUBCASE("tampered recorded hash is a mismatch") {
        auto j = nlohmann::json::parse(std::ifstream("out/f0.manifest.json"));
        j["outputs"][0]["sha256"] = std::string(64, '0');
        std::ofstream("out/f0.manifest.json") << j.dump(2);
        const auto rr = cli({"replay", "out/f0.manifest.json"});
        CHECK(rr.code == 2);
        CHECK(rr.out.find("MISMATCH") != std::string::npos);
    }
}

TEST_CASE("non-convergence exits 2 and still writes the best iterate") {
    Sandbox sb;
    const auto r = cli({"solve", "--n", "0.2", "--p", "1.2", "--max-iters", "1", "--tol", "1e-14", "--name", "x"});
    CHECK(r.code == 2);
    CHECK(fs::exists("out/x.csv"));
    CHECK(run::RunManifest::read("out/x.manifest.json").exit_code == 2);
}

TEST_CASE("BLOWUPLAB_OUT sets the default output directory") {
    Sandbox sb;
    setenv("BLOWUPLAB_OUT", "from_env", 1);
    const auto r = cli({"kernel", "--L", "20", "--N", "2000", "--lmax", "2"});
    unsetenv("BLOWUPLAB_OUT");
    CHECK(r.code == 0);
    CHECK(fs::exists("from_env/kernel.csv"));
    CHECK(fs::exists("from_env/kernel_pairings.csv"));
    CHECK_FALSE(fs::exists("out"));
    CHECK(cli({"kernel", "--L", "20", "--N", "2000", "--lmax", "2", "--out", "flag"}).code == 0);
    CHECK(fs::exists("flag/kernel.csv"));
}

TEST_CASE("oscillate and eigen write their dumps") {
    Sandbox sb;
    auto r = cli({"oscillate", "--n", "1", "--lambda", "1", "--span", "20", "--samples", "100"});
    CHECK(r.code == 0);
    const auto t = io::read_csv("out/oscillation.csv");
    CHECK(t.header == std::vector<std::string>{"s", "phi", "phi1", "phi2"});
    CHECK(t.columns[0].size() == 101);

    r = cli({"eigen", "--n", "0", "--R", "1", "--nodes", "201"});
    CHECK(r.code == 0);
    const auto e = io::read_csv("out/eigen.csv");
    CHECK(e.header == std::vector<std::string>{"n", "R", "lambda1"});
    CHECK(e.columns[2][0] == doctest::Approx(31.285).epsilon(5e-3));
}
