#include "wavelab/cli.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace wavelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("wavelab_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

int run_binary(const std::string& args) {
    const char* bin = std::getenv("WAVELAB_BIN");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("parsing flags") {
    const RunConfig c = parse_config({"sweep", "--a", "-0.5", "--p", "2", "--eps-start", "0.02", "--eps-count",
                                      "8", "--h", "0.05", "--threshold", "1e6"});
    CHECK(c.command == Command::Sweep);
    CHECK(c.a == -0.5);
    CHECK(c.eps_start == 0.02);
    CHECK(c.eps_count == 8);
    CHECK(c.h == 0.05);

    const RunConfig l = parse_config({"sweep", "--eps-list", "0.1,0.05,0.02,0.01"});
    CHECK(l.eps_list.size() == 4);
    const RunConfig f = parse_config({"solve", "--format", "csv,json"});
    CHECK(f.wants("csv"));
    CHECK_FALSE(f.wants("svg"));

    CHECK_THROWS_AS(parse_config({"solve", "--p", "0.9"}), UsageError);
    CHECK_THROWS_AS(parse_config({"solve", "--a", "-2"}), UsageError);
    CHECK_THROWS_AS(parse_config({"solve", "--h", "0"}), UsageError);
    CHECK_THROWS_AS(parse_config({"sweep", "--eps-list", "0.1,0.05"}), UsageError);
    CHECK_THROWS_AS(parse_config({"sweep", "--eps-list", "0.1,0.05,0.02,0.01", "--eps-start", "0.1"}),
                    UsageError);
    CHECK_THROWS_AS(parse_config({"frobnicate"}), UsageError);
    CHECK_THROWS_AS(parse_config({}), UsageError);
    CHECK_THROWS_AS(parse_config({"solve", "--nonlinearity", "cubic"}), UsageError);
    CHECK_THROWS_AS(parse_config({"solve", "--help"}), HelpRequested);
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path dir = scratch("config");
    const fs::path cfg = dir / "run.ini";
    {
        std::ofstream out(cfg);
        out << "h = 0.02\neps-start = 0.03\n";
    }
    const RunConfig from_file = parse_config({"sweep", "--config", cfg.string()});
    CHECK(from_file.h == 0.02);
    CHECK(from_file.eps_start == 0.03);
    const RunConfig flagged = parse_config({"sweep", "--config", cfg.string(), "--h", "0.01"});
    CHECK(flagged.h == 0.01);
    {
        std::ofstream out(cfg);
        out << "bogus = 1\n";
    }
    CHECK_THROWS_AS(parse_config({"solve", "--config", cfg.string()}), UsageError);
    CHECK_THROWS_AS(parse_config({"solve", "--data", (dir / "missing.csv").string()}), IoError);
}

TEST_CASE("config echo is valid JSON") {
    const RunConfig c = parse_config({"constants", "--a", "0"});
    const auto j = to_json(c);
    CHECK(j.at("command") == "constants");
    CHECK(j.at("a") == 0.0);
    CHECK(nlohmann::ordered_json::parse(j.dump()) == j);
}

TEST_CASE("sweep artifacts") {
    const fs::path dir = scratch("sweep");
    const std::string args = "sweep --a 1 --eps-start 0.05 --eps-count 8 --h 0.1 --jobs 2 --out-dir " +
                             dir.string() + " --prefix run";
    REQUIRE(run_binary(args) == 0);

    const std::string sweep = slurp(dir / "run_sweep.csv");
    CHECK(count_of(sweep, "\n") == 9);
    CHECK(sweep.rfind("eps,", 0) == 0);
    const std::string fit = slurp(dir / "run_fit.csv");
    CHECK(fit.find("theory_slope") != std::string::npos);
    const std::string svg = slurp(dir / "run_sweep.svg");
    CHECK(count_of(svg, "<circle") == 8);
    CHECK(count_of(svg, "<line") == 2);
    const auto report = nlohmann::json::parse(slurp(dir / "run_sweep.json"));
    CHECK(report.at("records").size() == 8);
    std::istringstream audit(slurp(dir / "run_audit.jsonl"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(audit, line)) {
        CHECK(nlohmann::json::accept(line));
        ++lines;
    }
    CHECK(lines == 8);

    const std::string first_csv = sweep;
    const std::string first_json = slurp(dir / "run_sweep.json");
    const std::string first_svg = svg;
    REQUIRE(run_binary(args) == 0);
    CHECK(slurp(dir / "run_sweep.csv") == first_csv);
    CHECK(slurp(dir / "run_sweep.json") == first_json);
    CHECK(slurp(dir / "run_sweep.svg") == first_svg);
}

TEST_CASE("other commands write their artifacts") {
    const fs::path dir = scratch("commands");
    const std::string out = " --out-dir " + dir.string();
    CHECK(run_binary("constants --a 0 --eps 0.01" + out) == 0);
    CHECK(fs::exists(dir / "wavelab_constants.json"));
    CHECK(run_binary("solve --a 1 --eps 0.5 --h 0.1" + out) == 0);
    CHECK(fs::exists(dir / "wavelab_solution.csv"));
    CHECK(fs::exists(dir / "wavelab_solve.json"));
    CHECK(run_binary("certify --a 1 --eps 0.05 --h 0.1" + out) == 0);
    CHECK(fs::exists(dir / "wavelab_certify.json"));
    CHECK(run_binary("envelope --a 1 --eps 0.5 --h 0.1" + out) == 0);
    CHECK(fs::exists(dir / "wavelab_envelope.jsonl"));
}

TEST_CASE("exit codes") {
    CHECK(run_binary("solve --p 0.9") == 2);
    CHECK(run_binary("nonsense") == 2);
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("constants --out-dir /proc/wavelab/denied") == 3);
}
