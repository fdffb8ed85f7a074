#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "perifix/cli.hpp"
#include "perifix/report.hpp"

using namespace perifix;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kGene = PERIFIX_TEST_DATA "/gene.json";
const std::string kBroken = PERIFIX_TEST_DATA "/broken.json";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("perifix_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate writes a trajectory CSV") {
    TempDir tmp;
    const auto csv = (tmp.path / "traj.csv").string();
    const auto r = run({"simulate", "--model", kGene, "--x0", "0,0,0", "--t-end", "50", "--dt", "0.05", "--out", csv});
    REQUIRE(r.code == 0);
    const auto rows = lines(slurp(csv));
    REQUIRE(rows.size() == 1002);
    CHECK(rows[0] == "t,x1,x2,x3");
    CHECK(rows[1] == "0,0,0,0");
    CHECK(rows.back().rfind("50,", 0) == 0);
    CHECK(slurp(csv).find('\r') == std::string::npos);

    const auto piped = run({"simulate", "--model", kGene, "--x0", "0,0,0", "--t-end", "1", "--dt", "0.5"});
    CHECK(piped.code == 0);
    CHECK(lines(piped.out).size() == 4);
}

TEST_CASE("numbers round-trip with 17 significant digits") {
    for (double v : {0.1, 1.0 / 3.0, 5.0 / 6.0, 1e-300, 123456789.125}) {
        const auto s = format_csv_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_csv_number(0.5) == "0.5");
}

TEST_CASE("model errors exit 2 and name the field") {
    const auto r = run({"simulate", "--model", kBroken, "--x0", "0,0,0", "--t-end", "1", "--dt", "0.1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("f[1]") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"fly"}).code == 1);
    CHECK(run({"simulate", "--model", kGene, "--t-end", "1", "--dt", "0.1"}).code == 1);
    CHECK(run({"simulate", "--model", kGene, "--x0", "0,0", "--t-end", "1", "--dt", "0.1"}).code == 1);
    CHECK(run({"simulate", "--model", kGene, "--x0", "a,b,c", "--t-end", "1", "--dt", "0.1"}).code == 1);
    CHECK(run({"simulate", "--model", kGene, "--x0", "0,0,0", "--t-end", "1", "--dt", "-0.1"}).code == 1);
    CHECK(run({"certify", "--model", kGene, "--x0", "1,1,1", "--y0", "0,0,0"}).code == 1);
    CHECK(run({"orbit", "--model", kGene, "--x0", "0,0,0", "--rtol", "0"}).code == 1);
}

TEST_CASE("orbit writes residual column") {
    const auto r = run({"orbit", "--model", kGene, "--x0", "0,0,0", "--iterations", "10"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == "k,x1,x2,x3,residual");
    CHECK(rows[1] == "0,0,0,0,");
    const auto last = rows.back();
    CHECK(std::stod(last.substr(last.rfind(',') + 1)) < 1e-4);
}

TEST_CASE("certify report on the gene model") {
    TempDir tmp;
    const auto path = tmp.path / "report.json";
    const auto r = run({"certify", "--model", kGene, "--seed", "7", "--out", path.string()});
    REQUIRE(r.code == 0);
    const auto rep = json::parse(slurp(path));
    CHECK(rep["command"] == "certify");
    CHECK(rep["seed"] == 7);
    CHECK(rep["model_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    std::set<std::string> names;
    for (const auto& c : rep["checks"]) {
        CHECK(c["verdict"] == "pass");
        if (c["name"] != "bracket_condition" && c["name"] != "H") CHECK(c["seed"] == 7);
        names.insert(c["name"].get<std::string>());
    }
    CHECK(names == std::set<std::string>{"A1_quasimonotone", "A2_input_monotone", "A3_output_decreasing",
                                         "box_invariance", "bracket_condition", "H"});
    CHECK(rep["certificate"]["status"] == "converged");
    CHECK(rep["certificate"]["gap"].get<double>() < 1e-6);
    CHECK(rep["certificate"]["fixed_point_residual"].get<double>() < 1e-8);
    CHECK(rep["certificate"]["uniqueness"] == "H");
    CHECK(rep["feedback_signature"]["delta_product"] == -1);
    CHECK(rep["solver"]["rtol"] == 1e-9);

    // Re-running with the same seed reproduces verdicts and margins.
    const auto again = json::parse(run({"certify", "--model", kGene, "--seed", "7"}).out);
    for (std::size_t i = 0; i < rep["checks"].size(); ++i) {
        CHECK(again["checks"][i]["verdict"] == rep["checks"][i]["verdict"]);
        CHECK(again["checks"][i]["worst_margin"] == rep["checks"][i]["worst_margin"]);
    }
}

TEST_CASE("strict certify exits 3 on failures") {
    TempDir tmp;
    const auto model = tmp.path / "bad.json";
    std::ofstream(model) << R"json({"type": "closed_loop", "n": 2, "period": 1,
        "f": ["u1 - x1 - x2", "x1 - x2"], "h": ["1/(1+x2)"],
        "state_box": {"lo": [0, 0], "hi": [1, 1]}})json";
    const auto lax = run({"certify", "--model", model.string()});
    CHECK(lax.code == 0);
    const auto rep = json::parse(lax.out);
    CHECK(rep["checks"][0]["verdict"] == "fail");
    CHECK(run({"certify", "--model", model.string(), "--strict"}).code == 3);
    CHECK(run({"certify", "--model", kGene, "--strict"}).code == 0);
}

TEST_CASE("reproduce-paper writes every artifact") {
    TempDir tmp;
    const auto dir = tmp.path / "out";
    const auto r = run({"reproduce-paper", "--outdir", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* f : {"model.json", "fig2.csv", "fig2.gp", "fig3.csv", "fig3.gp", "fig4.csv", "fig4.gp", "fig5.csv",
                          "fig5.gp", "certificate.json", "report.json"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
        CHECK(fs::file_size(dir / f) > 0);
    }
    const auto rep = json::parse(slurp(dir / "report.json"));
    for (const auto& f : rep["files"]) CHECK(fs::file_size(f.get<std::string>()) > 0);
    const auto fig3 = lines(slurp(dir / "fig3.csv"));
    CHECK(fig3[0] == "t,k0,k1,k2,k3,k4");
    CHECK(fig3.size() == 4002);
    CHECK(lines(slurp(dir / "fig2.csv"))[0] == "k,t,x1,x2,x3");
    CHECK(rep["reproduction"]["max_pairwise_distance_period_multiples"].get<double>() < 1e-3);
    CHECK(rep["reproduction"]["passed"] == true);
}

TEST_CASE("I/O failures exit 4") {
    TempDir tmp;
    const auto blocker = tmp.path / "file";
    std::ofstream(blocker) << "x";
    CHECK(run({"reproduce-paper", "--outdir", (blocker / "sub").string()}).code == 4);
    const auto r = run({"simulate", "--model", kGene, "--x0", "0,0,0", "--t-end", "1", "--dt", "0.1", "--out",
                        (blocker / "traj.csv").string()});
    CHECK(r.code == 4);
    CHECK(r.err.find("traj.csv") != std::string::npos);
}
