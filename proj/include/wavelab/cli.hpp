#pragma once

#include "wavelab/problem.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wavelab {

enum class Command { Solve, Sweep, Envelope, Certify, Constants };

struct RunConfig {
    Command command = Command::Solve;

    double a = 1.0;
    double p = 2.0;
    double eps = 0.05;
    std::vector<double> eps_list;
    double eps_start = 0.0;  ///< 0: pick it so the unit-constant law gives T = 50
    int eps_count = 8;
    double eps_ratio = 0.70710678118654752;
    std::string nonlinearity = "abs";  ///< abs | signed
    std::string data = "cos2-bump";    ///< builtin name or CSV path
    double c0 = 0.0;                   ///< constants only; 0: take it from the data

    double h = 0.1;
    double T_max = 0.0;  ///< 0: 3x the upper lifespan bound (or 2x it for solve/envelope)
    double T = 0.0;      ///< certify horizon; 0: half the self-consistent horizon
    double threshold = 1e6;
    double tol = 0.0;    ///< Picard tolerance; 0: 1e-8 M eps
    int j_max = 3;
    int stride = 1;
    double slope_tol = 0.0;  ///< > 0: assert |slope - theory| <= slope_tol
    unsigned jobs = 0;

    std::string out_dir = ".";
    std::string prefix = "wavelab";
    std::vector<std::string> formats{"csv", "json", "svg"};

    bool wants(const std::string& fmt) const;
};

std::string command_name(Command c);

/// Parses argv (subcommand first). A flat "key = value" file given with
/// --config supplies defaults; flags override it; unknown keys are rejected.
/// Throws UsageError on invalid or inconsistent values. A help request
/// throws HelpRequested carrying the help text.
RunConfig parse_config(const std::vector<std::string>& args);

struct HelpRequested {
    std::string text;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Builds the problem described by the config (eps from cfg.eps).
ProblemSpec make_spec(const RunConfig& cfg);

/// Full command-line entry point: 0 ok, 1 failed assertion, 2 usage, 3 I/O.
int run_cli(int argc, const char* const* argv);

}  // namespace wavelab
