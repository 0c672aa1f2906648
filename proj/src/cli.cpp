#include "wavelab/cli.hpp"

#include "wavelab/blowup.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/harness.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>

namespace wavelab {

namespace {

const std::map<std::string, Command> kCommands = {
    {"solve", Command::Solve},       {"sweep", Command::Sweep},
    {"envelope", Command::Envelope}, {"certify", Command::Certify},
    {"constants", Command::Constants},
};

const std::map<std::string, std::string> kDescriptions = {
    {"solve", "march one run to the threshold or T-max and dump the lattice"},
    {"sweep", "blow-up times over a geometric eps sweep with a log-log fit"},
    {"envelope", "audit the lower envelopes and the linear seed on a stored run"},
    {"certify", "Picard iteration with a contraction certificate"},
    {"constants", "print the case-table constants and the predicted lifespan"},
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

bool looks_like_path(const std::string& s) {
    return s.find('/') != std::string::npos || s.find('.') != std::string::npos;
}

void validate(const RunConfig& c, bool eps_list_given, bool eps_start_given) {
    require(c.p > 1.0, "p must exceed 1");
    require(c.a >= -1.0, "a must be at least -1");
    require(c.eps > 0.0, "eps must be positive");
    require(c.h > 0.0, "h must be positive");
    require(c.threshold > 0.0, "threshold must be positive");
    require(c.T_max >= 0.0, "T-max must be nonnegative");
    require(c.T >= 0.0, "T must be nonnegative");
    require(c.tol >= 0.0, "tol must be nonnegative");
    require(c.c0 >= 0.0, "c0 must be nonnegative");
    require(c.slope_tol >= 0.0, "slope-tol must be nonnegative");
    require(c.j_max >= 1, "j-max must be at least 1");
    require(c.stride >= 1, "stride must be at least 1");
    require(c.eps_ratio > 0.0 && c.eps_ratio < 1.0, "eps-ratio must lie in (0, 1)");
    require(c.eps_start >= 0.0, "eps-start must be positive");
    require(c.nonlinearity == "abs" || c.nonlinearity == "signed",
            "nonlinearity must be 'abs' or 'signed'");
    for (const std::string& f : c.formats) {
        require(f == "csv" || f == "json" || f == "svg", "unknown output format '" + f + "'");
    }
    require(!(eps_list_given && eps_start_given), "eps-list and eps-start are mutually exclusive");
    for (double e : c.eps_list) require(e > 0.0, "eps-list entries must be positive");
    if (c.command == Command::Sweep) {
        const std::size_t n = eps_list_given ? c.eps_list.size() : static_cast<std::size_t>(c.eps_count);
        require(n >= 4, "a sweep needs at least 4 eps values");
    }
    if (looks_like_path(c.data) && !std::filesystem::exists(c.data)) {
        throw IoError("initial data file '" + c.data + "' does not exist");
    }
}

std::string out_path(const RunConfig& c, const std::string& suffix) {
    return (std::filesystem::path(c.out_dir) / (c.prefix + "_" + suffix)).string();
}

double default_T_max(const ProblemSpec& spec, double factor) {
    return factor * upper_lifespan_bound(spec).T;
}

int cmd_solve(const RunConfig& c) {
    const ProblemSpec spec = make_spec(c);
    const double T_max = c.T_max > 0.0 ? c.T_max : default_T_max(spec, 2.0);
    MarchOptions opt;
    opt.store_stride = static_cast<std::size_t>(c.stride);
    const MarchResult m = march(spec, c.h, T_max, c.threshold, opt);
    Json summary{{"eps", spec.eps},
                 {"h", c.h},
                 {"T_max", T_max},
                 {"threshold", c.threshold},
                 {"levels", m.history.size()},
                 {"blew_up", m.blowup_row.has_value()},
                 {"T_numeric", m.history.back().t},
                 {"min_value", m.min_value}};
    if (m.blowup_row) {
        try {
            summary["T_extrapolated"] = extrapolate_blowup_time(m.history, spec.p());
        } catch (const ExtrapolationError& e) {
            summary["T_extrapolated"] = nullptr;
            summary["extrapolation_error"] = e.what();
        }
    }
    if (c.wants("csv")) write_text(out_path(c, "solution.csv"), solution_csv(m.solution));
    if (c.wants("json")) write_text(out_path(c, "solve.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return 0;
}

std::vector<double> sweep_eps(const RunConfig& c) {
    if (!c.eps_list.empty()) return c.eps_list;
    const double start = c.eps_start > 0.0 ? c.eps_start : eps_for_scale(c.p, c.a, 50.0);
    return geometric_eps(start, c.eps_count, c.eps_ratio);
}

int cmd_sweep(const RunConfig& c) {
    const ProblemSpec spec = make_spec(c);
    const std::vector<double> eps = sweep_eps(c);
    const std::vector<BlowupRecord> records = epsilon_sweep(spec, eps, c.h, c.threshold, c.jobs);
    const std::vector<SandwichEntry> sandwich = sandwich_check(records, spec);

    bool ok = true;
    Json doc{{"config", to_json(c)}, {"records", Json::array()}};
    for (const BlowupRecord& r : records) doc["records"].push_back(to_json(r));

    std::optional<ScalingFit> fit;
    try {
        fit = fit_scaling(records, c.a, c.p);
        doc["fit"] = to_json(*fit);
        if (c.slope_tol > 0.0 && std::fabs(fit->slope - fit->theory_slope) > c.slope_tol) {
            ok = false;
            doc["slope_check"] = "fail";
        }
    } catch (const InsufficientData& e) {
        doc["fit"] = nullptr;
        doc["fit_error"] = e.what();
        ok = false;
    }

    int inversions = 0;
    const BlowupRecord* prev = nullptr;
    for (const BlowupRecord& r : records) {
        if (r.censored) continue;
        if (prev && r.T_extrapolated > prev->T_extrapolated) ++inversions;
        prev = &r;
    }
    // records are sorted by increasing eps, so T should not increase
    doc["monotonicity_inversions"] = inversions;
    if (inversions > 1) ok = false;

    std::vector<Json> audit;
    for (const SandwichEntry& s : sandwich) {
        audit.push_back(to_json(s));
        if (!s.pass) ok = false;
    }
    doc["sandwich"] = audit;
    doc["pass"] = ok;

    if (c.wants("csv")) {
        write_text(out_path(c, "sweep.csv"), sweep_csv(records));
        if (fit) write_text(out_path(c, "fit.csv"), fit_csv(*fit));
    }
    if (c.wants("json")) {
        write_text(out_path(c, "sweep.json"), doc.dump(2) + "\n");
        write_text(out_path(c, "audit.jsonl"), json_lines(audit));
    }
    if (c.wants("svg") && fit) write_text(out_path(c, "sweep.svg"), scatter_svg(records, *fit));

    std::cout << sweep_csv(records);
    if (fit) std::cout << fit_csv(*fit);
    std::cout << (ok ? "sweep: all assertions passed\n" : "sweep: assertion failure\n");
    return ok ? 0 : 1;
}

int cmd_envelope(const RunConfig& c) {
    const ProblemSpec spec = make_spec(c);
    const double T_max = c.T_max > 0.0 ? c.T_max : default_T_max(spec, 2.0);
    MarchOptions opt;
    opt.store_stride = static_cast<std::size_t>(c.stride);
    const MarchResult m = march(spec, c.h, T_max, c.threshold, opt);
    const double c0 = data_norms(spec.data).c0;
    const IterationConstants consts = iteration_constants(c.p, c.a, c0, c.eps);

    std::vector<Json> lines;
    bool ok = true;
    for (const EnvelopeAuditEntry& e : envelope_audit(m.solution, consts, c.j_max, c.threshold)) {
        lines.push_back(to_json(e));
        if (e.violations > 0) ok = false;
    }
    const SeedAudit seed = linear_seed_audit(m.solution, c.eps, c0);
    lines.push_back(to_json(seed));
    if (seed.violations > 0) ok = false;
    if (m.min_value < 0.0) ok = false;
    lines.push_back(Json{{"audit", "positivity"}, {"min_value", m.min_value}});

    const std::string text = json_lines(lines);
    if (c.wants("json")) write_text(out_path(c, "envelope.jsonl"), text);
    std::cout << text;
    return ok ? 0 : 1;
}

int cmd_certify(const RunConfig& c) {
    ProblemSpec spec = make_spec(c);
    spec.mode = Mode::Existence;
    const double T = c.T > 0.0 ? c.T : 0.5 * self_consistent_horizon(spec).T;
    Json doc{{"eps", c.eps}, {"h", c.h}, {"T", T}};
    bool ok = false;
    try {
        const PicardResult r =
            picard_solve(spec, c.h, T, c.tol > 0.0 ? std::optional<double>(c.tol) : std::nullopt);
        doc["iterations"] = r.iterations;
        doc["differences"] = r.differences;
        doc["ratios"] = r.ratios;
        doc["iterate_norms"] = r.iterate_norms;
        doc["residual"] = r.residual;
        doc["horizon"] = r.horizon;
        doc["certificate"] = r.certificate ? to_json(*r.certificate) : Json(nullptr);
        ok = r.certificate.has_value();
    } catch (const IterationDiverged& e) {
        doc["error"] = e.what();
    } catch (const IterationStagnated& e) {
        doc["error"] = e.what();
    }
    doc["pass"] = ok;
    if (c.wants("json")) write_text(out_path(c, "certify.json"), doc.dump(2) + "\n");
    std::cout << doc.dump(2) << '\n';
    return ok ? 0 : 1;
}

int cmd_constants(const RunConfig& c) {
    const double c0 = c.c0 > 0.0 ? c.c0 : data_norms(make_spec(c).data).c0;
    const Json ledger = constants_ledger(c.p, c.a, c0, c.eps);
    if (c.wants("json")) write_text(out_path(c, "constants.json"), ledger.dump(2) + "\n");
    std::cout << ledger.dump(2) << '\n';
    return 0;
}

}  // namespace

bool RunConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

std::string command_name(Command c) {
    for (const auto& [name, cmd] : kCommands) {
        if (cmd == c) return name;
    }
    return "?";
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig c;
    CLI::App app{"Numerical laboratory for weighted semilinear 1D wave equations"};
    app.name("wavelab");
    app.set_help_flag("--help", "print this help and exit");
    app.set_config("--config", "", "flat key = value file; keys are flag names");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    app.add_option("--a", c.a, "weight exponent, >= -1");
    app.add_option("--p", c.p, "nonlinearity power, > 1");
    app.add_option("--eps", c.eps, "data amplitude");
    auto* eps_list = app.add_option("--eps-list", c.eps_list, "explicit sweep values")->delimiter(',');
    auto* eps_start = app.add_option("--eps-start", c.eps_start, "largest sweep value");
    app.add_option("--eps-count", c.eps_count, "number of sweep values");
    app.add_option("--eps-ratio", c.eps_ratio, "geometric ratio between sweep values");
    app.add_option("--nonlinearity", c.nonlinearity, "abs (|u|^p) or signed (|u|^{p-1}u)");
    app.add_option("--data", c.data, "builtin data name or CSV path with y,f,g rows");
    app.add_option("--c0", c.c0, "override c0 for constants");
    app.add_option("--h", c.h, "lattice spacing");
    app.add_option("--T-max", c.T_max, "time budget");
    app.add_option("--T", c.T, "certify horizon");
    app.add_option("--threshold", c.threshold, "blow-up amplitude threshold");
    app.add_option("--tol", c.tol, "Picard tolerance");
    app.add_option("--j-max", c.j_max, "largest envelope index to audit");
    app.add_option("--stride", c.stride, "keep every stride-th time level");
    app.add_option("--slope-tol", c.slope_tol, "assert |slope - theory| <= slope-tol");
    app.add_option("--jobs", c.jobs, "parallel runs (0: all cores)");
    app.add_option("--out-dir", c.out_dir, "output directory");
    app.add_option("--prefix", c.prefix, "output file prefix");
    app.add_option("--format", c.formats, "csv,json,svg")->delimiter(',');

    for (const auto& [name, cmd] : kCommands) {
        app.add_subcommand(name, kDescriptions.at(name))
            ->fallthrough()
            ->footer("All options are shared by every command; see wavelab --help.");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (const auto& [name, cmd] : kCommands) {
        if (app.got_subcommand(name)) c.command = cmd;
    }
    validate(c, eps_list->count() > 0, eps_start->count() > 0);
    return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    return nlohmann::ordered_json{{"command", command_name(c.command)},
                                  {"a", c.a},
                                  {"p", c.p},
                                  {"eps", c.eps},
                                  {"eps_list", c.eps_list},
                                  {"eps_start", c.eps_start},
                                  {"eps_count", c.eps_count},
                                  {"eps_ratio", c.eps_ratio},
                                  {"nonlinearity", c.nonlinearity},
                                  {"data", c.data},
                                  {"c0", c.c0},
                                  {"h", c.h},
                                  {"T_max", c.T_max},
                                  {"T", c.T},
                                  {"threshold", c.threshold},
                                  {"tol", c.tol},
                                  {"j_max", c.j_max},
                                  {"stride", c.stride},
                                  {"slope_tol", c.slope_tol},
                                  {"jobs", c.jobs},
                                  {"out_dir", c.out_dir},
                                  {"prefix", c.prefix},
                                  {"formats", c.formats}};
}

ProblemSpec make_spec(const RunConfig& c) {
    ProblemSpec spec;
    spec.a = c.a;
    spec.eps = c.eps;
    spec.nonlinearity =
        c.nonlinearity == "signed" ? Nonlinearity::signed_pow(c.p) : Nonlinearity::abs_pow(c.p);
    spec.data = looks_like_path(c.data) ? tabulated_data(c.data) : named_data(c.data);
    spec.mode = Mode::Blowup;
    return spec;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const RunConfig cfg = parse_config(args);
        std::cerr << to_json(cfg).dump() << '\n';
        std::filesystem::create_directories(cfg.out_dir);
        switch (cfg.command) {
        case Command::Solve: return cmd_solve(cfg);
        case Command::Sweep: return cmd_sweep(cfg);
        case Command::Envelope: return cmd_envelope(cfg);
        case Command::Certify: return cmd_certify(cfg);
        case Command::Constants: return cmd_constants(cfg);
        }
        return 2;
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace wavelab
