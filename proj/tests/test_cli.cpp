#include <doctest.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "s1deform/report.hpp"
#include "support.hpp"

using namespace s1d;
using namespace s1d::test;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string(S1D_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string quoted(const char* germ) { return std::string("--germ '") + germ + "'"; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("s1deform_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze") {
    const Run s1 = run("analyze " + quoted(kF0Plus));
    REQUIRE(s1.code == 0);
    const Json a = Json::parse(s1.out);
    CHECK(a["classification"]["kind"] == "S1Plus");
    CHECK(a["parabola"]["kind"] == "half-line");
    CHECK(a["whitney_test"] == false);

    const Json u = Json::parse(run("analyze " + quoted(kUmbrella)).out);
    CHECK(u["classification"]["kind"] == "umbrella");
    CHECK(u["invariants"]["a02"].get<double>() == doctest::Approx(2.0));

    const Run reg = run("analyze " + quoted(kFsPlus) + " --s 1");
    CHECK(reg.code == 0);
    CHECK(Json::parse(reg.out)["status"] == "regular");
}

TEST_CASE("exit codes and error JSON") {
    const Run usage = run("analyze");
    CHECK(usage.code == 2);
    CHECK(Json::parse(usage.out)["error"]["kind"] == "usage");
    CHECK(run("frobnicate").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("normal-form " + quoted(kFsPlus) + " --order 13").code == 2);

    const Run parse = run("analyze --germ 'u; v^2 +; v'");
    CHECK(parse.code == 2);
    CHECK(Json::parse(parse.out)["error"]["column"] == 9);

    const Run domain = run("normal-form " + quoted(kUmbrella));
    CHECK(domain.code == 3);
    CHECK(Json::parse(domain.out)["error"]["kind"] == "degenerate");
    CHECK(run("focal " + quoted(kFsPlus) + " --s 1 --out " + scratch("nofocal").string()).code == 3);
}

TEST_CASE("germ from a file") {
    const fs::path dir = scratch("file");
    fs::create_directories(dir);
    std::ofstream(dir / "germ.txt") << "# f^{s,+}\nu\nv^2\nv*(u^2+v^2) + s*v\n";
    const Run r = run("normal-form --file " + (dir / "germ.txt").string());
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["classification"]["kind"] == "S1Plus");
}

TEST_CASE("trace writes a CSV whose numbers round-trip") {
    const fs::path dir = scratch("trace");
    const Run r = run("trace " + quoted(kFsPlus) + " --out " + dir.string());
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / "trace.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "s_tilde,u_plus,u_minus,a20,a11,a02,ku_ext,ka,conic_kind");
    const TraceTable t = trace(parse_germ(kFsPlus), GeometricGrid{});
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        REQUIRE(row < t.rows.size());
        std::istringstream cells(line);
        std::string cell;
        std::vector<double> x;
        while (std::getline(cells, cell, ',')) {
            double d = 0;
            if (std::from_chars(cell.data(), cell.data() + cell.size(), d).ec == std::errc()) x.push_back(d);
        }
        REQUIRE(x.size() == 8);
        const double s_tilde = t.rows[row].s_tilde;
        CHECK(x[0] == s_tilde);
        CHECK(x[5] == t.rows[row].plus.a02);
        CHECK(x[5] == doctest::Approx(1 / (2 * s_tilde * s_tilde)).epsilon(1e-9));
        ++row;
    }
    CHECK(row == 7);
    const Json j = Json::parse(slurp(dir / "trace.json"));
    CHECK(j["table"]["rows"][3]["plus"]["a02"].get<double>() == t.rows[3].plus.a02);
}

TEST_CASE("trace reports Cor. style hyperbolas and empty loci") {
    const Json h = Json::parse(run("trace " + quoted(kHyperbola) + " --out " + scratch("hyp").string()).out);
    CHECK(h["asymptotics"]["all_hyperbolas"] == true);

    const fs::path dir = scratch("empty");
    const Run e = run("trace " + quoted(kFocalSweepSquared) + " --out " + dir.string());
    CHECK(e.code == 0);
    CHECK(Json::parse(e.out)["empty"] == true);
    CHECK(slurp(dir / "trace.csv") == "s_tilde,u_plus,u_minus,a20,a11,a02,ku_ext,ka,conic_kind\n");
}

TEST_CASE("focal SVGs") {
    const struct {
        const char* germ;
        const char* s;
        const char* kind;
    } cases[] = {{kFocalSweep, "-1", "ellipse"},
                 {kFocalSweep, "-0.25", "parabola"},
                 {kFocalSweep, "-0.2", "hyperbola"},
                 {kFocalSweep, "0", "two-lines"},
                 {kParabolaFamily, "-1", "parabola"}};
    int i = 0;
    for (const auto& c : cases) {
        const fs::path dir = scratch("focal" + std::to_string(i++));
        const Run r = run(std::string("focal ") + quoted(c.germ) + " --s " + c.s + " --out " + dir.string());
        REQUIRE(r.code == 0);
        CHECK(Json::parse(r.out)["conic"]["kind"] == c.kind);
        const std::string svg = slurp(dir / "focal.svg");
        CHECK(svg.find("viewBox=\"-5 -5 10 10\"") != std::string::npos);
        CHECK(svg.find(std::string(">") + c.kind + "<") != std::string::npos);
        CHECK(svg.find("d=\"M") != std::string::npos);
    }
}

TEST_CASE("mesh") {
    const fs::path dir = scratch("mesh");
    const Run r = run("mesh " + quoted(kFsPlus) + " --s -1 --k-sign --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["vertices"] == 2500);
    const std::string obj = slurp(dir / "mesh.obj");
    CHECK(std::count(obj.begin(), obj.end(), '\n') == 2500 + 2 * 49 * 49);
    CHECK(obj.rfind("v ", 0) == 0);
    CHECK(slurp(dir / "k_sign.txt").size() >= 2 * 2500);
    CHECK(run("mesh " + quoted(kFsPlus) + " --resolution 1 --out " + dir.string()).code == 2);
}

TEST_CASE("identical runs give identical bytes") {
    for (const std::string cmd : {"trace " + quoted(kHyperbola), "focal " + quoted(kFocalSweep) + " --s -1",
                                  "mesh " + quoted(kFPlus) + " --s -0.01 --k-sign",
                                  "normal-form " + quoted(kFPlus) + " --probe 3 --seed 5"}) {
        const fs::path a = scratch("det_a");
        const fs::path b = scratch("det_b");
        const Run ra = run(cmd + " --out " + a.string());
        const Run rb = run(cmd + " --out " + b.string());
        CHECK(ra.code == 0);
        CHECK(ra.out == rb.out);
        if (fs::exists(a)) {
            for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        }
    }
}

TEST_CASE("gauss-probe") {
    const Run r = run("gauss-probe " + quoted(kFMinus));
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["probe"]["agree"] == 128);
    CHECK(j["probe"]["total"] == 128);
}

}  // TEST_SUITE

TEST_SUITE("report") {

TEST_CASE("doubles round-trip through the text formats") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 49.99999999999999}) {
        const std::string s = format_double(x);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
        CHECK(Json::parse(Json(x).dump()).get<double>() == x);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-0.0) == "0");
}

TEST_CASE("JSON keys come out sorted") {
    const std::string d = dump(to_json(CoefficientSet{}));
    CHECK(d.find("\"c1_0\"") < d.find("\"c20\""));
    CHECK(d.find("\"d3\"") < d.find("\"f21_0\""));
}

}  // TEST_SUITE
