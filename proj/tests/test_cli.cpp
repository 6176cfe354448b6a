#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" ADVS_CLI_PATH "\" " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("advs_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

}  // namespace

TEST_CASE("gap values") {
    auto r = run("gap --n 2 --s 0.5");
    CHECK(r.code == 0);
    CHECK(r.out == "0.5\n");
    CHECK(run("gap --n 10 --s 0").out == "1\n");
    CHECK(std::stod(run("gap --n 4 --s 0.25").out) == doctest::Approx(0.544862367942584194).epsilon(1e-15));
    r = run("gap --n 2 --grid 3");
    CHECK(r.code == 0);
    CHECK(r.out == "s,gap\n0,1\n0.5,0.5\n1,1\n");
    const auto j = nlohmann::json::parse(run("gap --n 6 --grid 5 --format json").out);
    CHECK(j.size() == 5);
}

TEST_CASE("schedule output") {
    const auto r = run("schedule --kind uniform --n 2 --T 10");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("T") == 10.0);
    for (const auto& row : j.at("grid"))
        CHECK(row.at(1).get<double>() == doctest::Approx(row.at(0).get<double>() / 10.0).epsilon(1e-15));
}

TEST_CASE("matrix elements output") {
    const auto r = run("matrix-elements --n 4 --kind uniform --T 10 --grid 3 --channel z --qubit 1");
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,s,re,im,magnitude,coefficient,suppressed");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("fit on a synthetic sqrt(N) table") {
    Scratch tmp;
    std::string csv = "n,N,schedule,preset,method,T,gap_min,p1,err,seconds\n";
    for (int n = 4; n <= 12; ++n) {
        const double N = std::ldexp(1.0, n);
        char line[128];
        std::snprintf(line, sizeof line, "%d,%.17g,gap_squared,flat,markov,1,1,%.17g,0,\n", n, N, 1e-4 * std::sqrt(N));
        csv += line;
    }
    const auto r = run("fit " + tmp.write("rows.csv", csv) + " --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.size() == 1);
    CHECK(j[0].at("exponent").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(j[0].at("classification") == "non-scalable");
}

TEST_CASE("p1 report") {
    Scratch tmp;
    const auto cfg = tmp.write("c.json", R"j({"n": [4], "presets": ["markovian"], "schedules": ["uniform"]})j");
    const auto r = run("p1 --config " + cfg + " --method all");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto& est = j.at("cases").at(0).at("estimates");
    CHECK(est.size() == 4);
    // every engine lands on the same delta-kernel value
    const double ref = est[0].at("value").get<double>();
    for (const auto& e : est)
        if (e.at("method") != "asymptotic") CHECK(e.at("value").get<double>() == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("exit codes") {
    Scratch tmp;
    CHECK(run("gap --n 2 --s 1.5").code == 1);
    CHECK(run("gap").code == 1);
    CHECK(run("teleport").code == 1);
    CHECK(run("p1 --config " + tmp.write("bad.json", R"j({"colour": 1})j")).code == 1);
    CHECK(run("p1 --config " + (tmp.dir / "missing.json").string()).code == 1);
    CHECK(run("fit " + tmp.write("bad.csv", "x,y\n1,2\n")).code == 1);
    const auto divergent = tmp.write("ir.json", R"j({"n": [4], "presets": ["phonon_thermal(1)"]})j");
    CHECK(run("p1 --config " + divergent).code == 2);
    const auto ok = tmp.write("ok.json", R"j({"n": [6], "presets": ["photon_thermal(3)"]})j");
    CHECK(run("p1 --config " + ok).code == 0);
    CHECK(run("p1 --config " + ok, "ADVS_BUDGET=50").code == 2);
    CHECK(run("p1 --config " + ok, "ADVS_BUDGET=lots").code == 1);
}

TEST_CASE("sweep outputs are byte-identical across runs") {
    Scratch tmp;
    const auto cfg = tmp.write("s.json", R"j({"n": "4..8", "schedules": ["gap_squared", "uniform"],
                                             "presets": ["photon_thermal(2)", "photon_thermal(3)"]})j");
    const auto a = tmp.dir / "a", b = tmp.dir / "b";
    REQUIRE(run("sweep --config " + cfg + " --out " + a.string() + " --jobs 3").code == 0);
    REQUIRE(run("sweep --config " + cfg + " --out " + b.string() + " --jobs 1").code == 0);
    const std::string csv = slurp(a / "sweep.csv");
    CHECK(csv.size() > 100);
    CHECK(csv == slurp(b / "sweep.csv"));
    CHECK(slurp(a / "sweep.json") == slurp(b / "sweep.json"));
    const auto summary = nlohmann::json::parse(slurp(a / "sweep.json"));
    CHECK(summary.at("fits").size() == 4);

    REQUIRE(run("sweep --config " + cfg + " --out " + a.string() + " --format dat --n 4..7").code == 0);
    CHECK(fs::exists(a / "sweep.dat"));
}
