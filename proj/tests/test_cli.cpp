#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "heatlab/config.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/tasks.hpp"

namespace fs = std::filesystem;
using namespace heatlab;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("heatlab_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("parse a model section with defaults") {
    TaskConfig c = parse_config("[model] family=exp_alpha alpha=0.5 n=2\n");
    CHECK(c.model == "family=exp_alpha alpha=0.5 n=2");
    CHECK(c.task == TaskKind::geometry);
    CHECK(c.weight == WeightKind::none);
    CHECK(c.seed == 42);
    CHECK(c.format == OutputFormat::csv);
    CHECK_FALSE(c.t_start.has_value());
}

TEST_CASE("config errors") {
    CHECK_THROWS_WITH_AS(parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n[task] task=bounds\n"),
                         doctest::Contains("t_start"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model] family=exp_alpha alpha=1.5 n=2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid] bogus=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nosuch]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid] nodes=-4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid] dt=0\n"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[task] task=geometry\n[grid] this is not a pair\n"), doctest::Contains("line 2"),
                         ConfigError);
}

TEST_CASE("render and parse round trip") {
    TaskConfig c = parse_config(
        "# comment\n[model] family=exp_alpha alpha=0.25 n=3 weight=two_end\n[minus] family=hyperbolic n=3\n"
        "[task] task=pipeline\n[time] t_start=10 t_end=1000 t_steps=21 log_spaced=false\n"
        "[grid] nodes=2000 dt=0.05 r_min=-30 r_max=200 spacing=graded ratio=1.001\n"
        "[output] dir=somewhere format=json\n[calibration] anchor=20 fk_c=0.5 fk_Q=1.5\n[verify] seed=9\n");
    CHECK(parse_config(render_config(c)) == c);
    CHECK(config_hash(c) == config_hash(parse_config(render_config(c))));
    CHECK(config_hash(c).size() == 16);
    TaskConfig d = c;
    d.fk_Q = 1.6;
    CHECK(config_hash(c) != config_hash(d));
    std::vector<double> t = config_times(c);
    CHECK(t.size() == 21);
    CHECK(t[1] - t[0] == doctest::Approx(49.5));
}

TEST_CASE("geometry task writes the declared table") {
    TempDir tmp;
    TaskConfig c = parse_config("[model] family=euclidean n=2\n[task] task=geometry\n");
    TaskOutcome o = execute_task(c, tmp.path.string());
    REQUIRE(o.exit_code == exit_ok);
    std::istringstream csv(slurp(tmp.path / "geometry.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r,S,S_tilde,V");
    bool found = false;
    while (std::getline(csv, line)) {
        double r, S, St, V;
        char sep;
        std::istringstream row(line);
        row >> r >> sep >> S >> sep >> St >> sep >> V;
        if (std::fabs(r - 2.0) < 1e-12) {
            CHECK(V == doctest::Approx(2.0).epsilon(1e-8));
            found = true;
        }
    }
    CHECK(found);
    CHECK(fs::exists(tmp.path / "config.effective"));
    CHECK(parse_config(slurp(tmp.path / "config.effective")) == c);
    auto rep = nlohmann::json::parse(slurp(tmp.path / "report.json"));
    CHECK(rep["task"] == "geometry");
}

TEST_CASE("iso and fk tasks write their headers") {
    TempDir tmp;
    TaskConfig iso = parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n[task] task=iso\n");
    REQUIRE(execute_task(iso, (tmp.path / "iso").string()).exit_code == exit_ok);
    CHECK(slurp(tmp.path / "iso" / "iso.csv").rfind("v,J_nu,J_warped,J_asymptotic\n", 0) == 0);
    TaskConfig fk = parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n[task] task=fk\n");
    REQUIRE(execute_task(fk, (tmp.path / "fk").string()).exit_code == exit_ok);
    CHECK(slurp(tmp.path / "fk" / "fk.csv").rfind("v,Lambda\n", 0) == 0);
}

TEST_CASE("solve task writes snapshots and json tables") {
    TempDir tmp;
    TaskConfig c = parse_config("[model] family=power beta=0 n=2\n[task] task=solve source=3\n"
                                "[time] t_start=0.5 t_end=2 t_steps=2 log_spaced=false\n"
                                "[grid] nodes=256 dt=0.01 r_max=10\n");
    REQUIRE(execute_task(c, tmp.path.string()).exit_code == exit_ok);
    int snapshots = 0;
    for (const auto& e : fs::directory_iterator(tmp.path))
        if (e.path().filename().string().rfind("field_t", 0) == 0) {
            ++snapshots;
            CHECK(slurp(e.path()).rfind("r,u\n", 0) == 0);
        }
    CHECK(snapshots == 2);
    c.format = OutputFormat::json;
    TaskOutcome o = execute_task(c, (tmp.path / "json").string());
    auto rep = nlohmann::json::parse(o.report_json);
    CHECK(rep.contains("tables"));
}

TEST_CASE("exit codes") {
    TempDir tmp;
    write(tmp.path / "bad.cfg", "[model] family=exp_alpha alpha=1.5 n=2\n");
    CHECK(run_config_file((tmp.path / "bad.cfg").string()).exit_code == exit_config);
    CHECK(run_config_file((tmp.path / "missing.cfg").string()).exit_code == exit_config);
    // A parabolic minus end fails inside the numeric stages.
    TaskConfig c = parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n"
                                "[minus] family=euclidean n=2\n[task] task=iso\n");
    TaskOutcome o = execute_task(c, tmp.path.string());
    CHECK(o.exit_code == exit_numeric);
    CHECK(o.message.find("build_two_end_weight") != std::string::npos);
    TaskConfig v = parse_config("[task] task=verify\n");
    TaskOutcome vo = execute_task(v, (tmp.path / "verify").string());
    CHECK(vo.exit_code == exit_ok);
    CHECK(vo.message.find("PASS") != std::string::npos);
    CHECK(vo.message.find("FAIL") == std::string::npos);
}

TEST_CASE("output directory override") {
    TaskConfig c;
    c.out_dir = "from_config";
    unsetenv("HEATLAB_OUT");
    CHECK(resolve_out_dir(c) == "from_config");
    setenv("HEATLAB_OUT", "from_env", 1);
    CHECK(resolve_out_dir(c) == "from_env");
    unsetenv("HEATLAB_OUT");
}

TEST_CASE("sweep") {
    TempDir tmp;
    std::ostringstream log;
    fs::create_directories(tmp.path / "empty");
    CHECK(sweep((tmp.path / "empty").string(), log) == exit_ok);
    CHECK(nlohmann::json::parse(slurp(tmp.path / "empty" / "sweep.json")).empty());

    fs::path d = tmp.path / "mixed";
    fs::create_directories(d);
    write(d / "a.cfg", "[model] family=euclidean n=2\n[task] task=geometry\n");
    write(d / "b.cfg", "[model] family=exp_alpha alpha=1.5 n=2\n[task] task=geometry\n");
    write(d / "c.cfg", "[model] family=euclidean n=3\n[task] task=geometry\n");
    CHECK(sweep(d.string(), log) == exit_config);
    auto merged = nlohmann::json::parse(slurp(d / "sweep.json"));
    CHECK(merged.size() == 3);
    int ok = 0;
    for (auto& [key, entry] : merged.items()) {
        if (entry["exit"] == 0) {
            ++ok;
            CHECK(fs::exists(d / key / "geometry.csv"));
        }
    }
    CHECK(ok == 2);
    std::string first = slurp(d / "sweep.json");
    CHECK(sweep(d.string(), log) == exit_config);
    CHECK(slurp(d / "sweep.json") == first);
    CHECK(sweep((tmp.path / "nope").string(), log) == exit_config);
}

TEST_CASE("identical configs give byte-identical output") {
    TempDir tmp;
    TaskConfig c = parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n[task] task=iso\n");
    execute_task(c, (tmp.path / "a").string());
    execute_task(c, (tmp.path / "b").string());
    CHECK(slurp(tmp.path / "a" / "iso.csv") == slurp(tmp.path / "b" / "iso.csv"));
    CHECK(slurp(tmp.path / "a" / "report.json") == slurp(tmp.path / "b" / "report.json"));
}

TEST_CASE("pipeline task") {
    TempDir tmp;
    TaskConfig c = parse_config("[model] family=exp_alpha alpha=0.5 n=2 weight=two_end\n[minus] family=hyperbolic n=2\n"
                                "[task] task=pipeline\n[time] t_start=10 t_end=1000 t_steps=21\n");
    TaskOutcome o = execute_task(c, tmp.path.string());
    REQUIRE(o.exit_code == exit_ok);
    for (const char* f : {"bounds.csv", "iso.csv", "eigen.csv", "report.json"}) CHECK(fs::exists(tmp.path / f));
    CHECK(slurp(tmp.path / "bounds.csv").rfind("t,upper,lower,numeric\n", 0) == 0);
    CHECK(slurp(tmp.path / "eigen.csv").rfind("R,lambda1,rayleigh_upper", 0) == 0);
    auto rep = nlohmann::json::parse(slurp(tmp.path / "report.json"));
    double beta = rep["fitted_exponent"].get<double>();
    CHECK(std::fabs(beta - 1.0 / 3.0) <= 0.05);
}
