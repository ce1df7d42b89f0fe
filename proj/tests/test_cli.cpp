#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ssb/cli/config.hpp"
#include "ssb/cli/experiments.hpp"
#include "ssb/cli/report.hpp"

using namespace ssb::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ssb-lab-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int lab(const std::string& args) {
    const std::string cmd = std::string(SSB_LAB_EXE) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ExperimentConfig config_for(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    return cfg;
}

const Json* find_check(const Json& report, const std::string& name) {
    for (const auto& c : report["checks"]) {
        if (c["name"] == name) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
    const auto cfg = config_from_json(nlohmann::json::parse(R"({
        "experiment": "ualpha-levels",
        "model": {"alphas": [10, 20], "a": 2, "b": 0.5},
        "grid": {"n": 2001},
        "tolerances": {"degeneracy": 1e-9},
        "output": "somewhere",
        "jobs": 2
    })"));
    CHECK(cfg.experiment == "ualpha-levels");
    CHECK(cfg.model.alphas == std::vector<double>{10, 20});
    CHECK(cfg.grid.n == 2001u);
    CHECK_FALSE(cfg.grid.xmin.has_value());
    CHECK(cfg.tolerances.degeneracy == 1e-9);
    CHECK_FALSE(cfg.tolerances.residual.has_value());
    CHECK(cfg.jobs == 2);
    CHECK(cfg.trials == 1000);
    CHECK_NOTHROW(validate(cfg));

    const auto empty = config_from_json(nlohmann::json::object());
    CHECK(empty.tolerances.degeneracy == 1e-8);
    CHECK(empty.jobs == 0);
    CHECK_THROWS_AS(validate(empty), ConfigError);
}

TEST_CASE("config rejects unknown keys and bad values") {
    using nlohmann::json;
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"experiment": "uinf-ssb", "colour": 1})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"model": {"alpah": 1}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"grid": {"n": -5}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"grid": {"n": 1.5}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"tolerances": {"degeneracy": "small"}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"([1, 2])")), ConfigError);

    auto cfg = config_for("no-such-experiment");
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = config_for("uinf-ssb");
    cfg.grid.n = 2;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = config_for("uinf-ssb");
    cfg.tolerances.degeneracy = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = config_for("sextic-ground");
    cfg.model.a = 1.0;
    cfg.model.a_sextic = 2.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);

    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("sextic width accepts both spellings") {
    ModelSpec m;
    m.a = 0.5;
    CHECK(sextic_width(m) == 0.5);
    m.a_sextic = 2.0;
    CHECK(sextic_width(m) == 2.0);
}

TEST_CASE("output directory precedence") {
    auto cfg = config_for("uinf-ssb");
    ::unsetenv("SSB_LAB_OUT");
    CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path(kDefaultOutputDir));
    cfg.output = "from-file";
    CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path("from-file"));
    ::setenv("SSB_LAB_OUT", "from-env", 1);
    CHECK(resolve_output_dir(cfg, std::nullopt) == fs::path("from-env"));
    CHECK(resolve_output_dir(cfg, std::string("from-flag")) == fs::path("from-flag"));
    ::unsetenv("SSB_LAB_OUT");
}

TEST_CASE("csv layout") {
    Table t{"demo", {"x", "label", "k"}, {}};
    t.add({0.1, std::string("a"), std::int64_t{3}});
    t.add({-2.0, std::string("b"), std::int64_t{-1}});
    std::ostringstream out;
    write_csv(out, t);
    CHECK(out.str() == "x,label,k\n0.10000000000000001,a,3\n-2,b,-1\n");
    CHECK_THROWS(t.add({1.0}));
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("report examples") {
    SUBCASE("uinf-ssb") {
        const auto r = run_experiment(config_for("uinf-ssb"));
        CHECK(r.passed);
        const auto& res = r.report["results"];
        CHECK(res["verdict"]["ground_multiplicity"] == 2);
        CHECK(res["verdict"]["pair_overlap"].get<double>() == 0.0);
        CHECK(res["E1"].get<double>() == doctest::Approx(2.19325).epsilon(1e-5));
        CHECK(r.report["schema"] == 1);
    }
    SUBCASE("sombrero-gap") {
        const auto r = run_experiment(config_for("sombrero-gap"));
        CHECK(r.passed);
        CHECK(r.report["results"]["quartic"]["verdict"]["broken"] == false);
        CHECK(r.report["results"]["quartic"]["gap"].get<double>() > 0.0);
    }
    SUBCASE("sextic-ground") {
        const auto r = run_experiment(config_for("sextic-ground"));
        CHECK(r.passed);
        CHECK(std::abs(r.report["results"]["ground_energy"].get<double>()) < 1e-4);
        CHECK(r.report["results"]["ground_l2_error"].get<double>() < 1e-3);
    }
}

TEST_CASE("every check names its tolerance") {
    auto cfg = config_for("pair-lemma");
    cfg.trials = 20;
    const auto r = run_experiment(cfg);
    CHECK(r.passed);
    for (const auto& c : r.report["checks"]) {
        CHECK((c.contains("tolerance") || c.contains("expected")));
        CHECK(c.contains("relation"));
    }
    CHECK(r.report["checks"].size() == r.checks.size());
}

TEST_CASE("precondition failures become report errors") {
    auto cfg = config_for("uinf-ssb");
    cfg.model.a = 0.4;  // a < b
    const auto r = run_experiment(cfg);
    CHECK_FALSE(r.passed);
    REQUIRE(r.report["errors"].size() == 1);
    CHECK(r.report["errors"][0]["kind"] == "domain");

    cfg = config_for("uinf-ssb");
    cfg.grid.xmin = -3.0;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("failed checks fail the report") {
    auto cfg = config_for("sextic-ground");
    cfg.grid.n = 101;
    const auto r = run_experiment(cfg);
    CHECK_FALSE(r.passed);
    const auto* c = find_check(r.report, "ground_energy.abs");
    REQUIRE(c != nullptr);
    CHECK((*c)["passed"] == false);
}

TEST_CASE("in-process reports are deterministic, including the worker count") {
    auto cfg = config_for("ualpha-levels");
    cfg.model.alphas = std::vector<double>{10, 50, 200};
    cfg.grid.n = 1001;
    cfg.jobs = 1;
    const auto a = run_experiment(cfg);
    cfg.jobs = 3;
    const auto b = run_experiment(cfg);
    CHECK(a.report.dump() == b.report.dump());
    std::ostringstream ca, cb;
    for (const auto& t : a.tables) write_csv(ca, t);
    for (const auto& t : b.tables) write_csv(cb, t);
    CHECK(ca.str() == cb.str());
}

TEST_CASE("figure data") {
    auto cfg = config_for("");
    const auto f1 = figure_data(1, cfg);
    CHECK(f1.columns == std::vector<std::string>{"x", "V"});
    CHECK(std::get<double>(f1.rows.front()[0]) == doctest::Approx(-1.2));
    CHECK(std::get<double>(f1.rows.back()[0]) == doctest::Approx(1.2));
    for (const auto& row : f1.rows) {
        const double x = std::get<double>(row[0]);
        REQUIRE(std::get<double>(row[1]) == doctest::Approx(x * x * x * x - x * x));
    }
    const auto f2 = figure_data(2, cfg);
    CHECK(f2.columns == std::vector<std::string>{"x", "V", "f"});
    for (const auto& row : f2.rows) {
        const double x = std::get<double>(row[0]);
        REQUIRE(std::get<double>(row[2]) == doctest::Approx(std::exp(-x * x * x * x)));
    }
    const auto f5 = figure_data(5, cfg);
    std::size_t walls = 0, open = 0;
    for (const auto& row : f5.rows) {
        const bool wall = std::get<std::int64_t>(row[2]) == 1;
        walls += wall;
        open += !wall;
        if (!wall) REQUIRE(std::get<double>(row[1]) == 0.0);
    }
    CHECK(walls > 0);
    CHECK(open > 0);
    CHECK(figure_data(3, cfg).rows.size() == 401);
    CHECK(figure_data(4, cfg).columns.size() == 3);
    CHECK_THROWS_AS(figure_data(6, cfg), ConfigError);
}

TEST_CASE("catalog") {
    CHECK(catalog().size() == 8);
    for (const auto& e : catalog()) CHECK(is_experiment(e.name));
    CHECK_FALSE(is_experiment("figure"));
}

TEST_CASE("executable: exit status, files, determinism") {
    const auto a = scratch("a");
    const auto b = scratch("b");
    CHECK(lab("uinf-ssb --grid-n 2001 --out " + a.string()) == 0);
    CHECK(lab("uinf-ssb --grid-n 2001 --out " + b.string()) == 0);
    CHECK(fs::exists(a / "report.json"));
    CHECK(fs::exists(a / "uinf_levels.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "uinf_pair.csv") == slurp(b / "uinf_pair.csv"));
    const auto report = nlohmann::json::parse(slurp(a / "report.json"));
    CHECK(report["config"]["grid"]["n"] == 2001);
    CHECK(report["passed"] == true);

    // config file plus an overriding flag
    const auto cfg_path = scratch("cfg.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"experiment": "sextic-ground", "grid": {"n": 101}, "output": ")" << a.string() << R"("})";
    }
    CHECK(lab("sextic-ground --config " + cfg_path.string()) == 1);
    CHECK(lab("sextic-ground --config " + cfg_path.string() + " --grid-n 2001") == 0);
    CHECK(lab("uinf-ssb --config " + cfg_path.string()) == 2);

    {
        std::ofstream out(cfg_path);
        out << R"({"experiment": "sextic-ground", "bogus": true})";
    }
    CHECK(lab("sextic-ground --config " + cfg_path.string()) == 2);

    ::setenv("SSB_LAB_OUT", b.string().c_str(), 1);
    fs::remove_all(b);
    CHECK(lab("figure 1") == 0);
    CHECK(fs::exists(b / "figure1.csv"));
    ::unsetenv("SSB_LAB_OUT");
    CHECK(slurp(b / "figure1.csv").rfind("x,V\n", 0) == 0);

    CHECK(lab("figure 9 --out " + b.string()) == 2);
    CHECK(lab("list") == 0);
    CHECK(lab("no-such-thing") != 0);

    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove(cfg_path);
}
