#include "wavelab/report.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavelab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

/// JSON cannot hold inf; store it as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string sweep_csv(std::span<const BlowupRecord> records) {
    std::ostringstream out;
    out << "eps,T_numeric,T_extrapolated,h,threshold,censored\n";
    for (const BlowupRecord& r : records) {
        out << num(r.eps) << ',' << num(r.T_numeric) << ',' << num(r.T_extrapolated) << ','
            << num(r.h) << ',' << num(r.threshold) << ',' << (r.censored ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string fit_csv(const ScalingFit& fit) {
    std::ostringstream out;
    out << "slope,stderr,r_squared,theory_slope\n";
    out << num(fit.slope) << ',' << num(fit.stderr_slope) << ',' << num(fit.r_squared) << ','
        << num(fit.theory_slope) << '\n';
    return out.str();
}

std::string solution_csv(const LatticeSolution& solution) {
    std::ostringstream out;
    out << "x,t,u\n";
    for (std::size_t r = 0; r < solution.rows(); ++r) {
        for (std::size_t i = 0; i < solution.n_x(); ++i) {
            out << num(solution.x(i)) << ',' << num(solution.t(r)) << ',' << num(solution(i, r))
                << '\n';
        }
    }
    return out.str();
}

Json to_json(const BlowupRecord& r) {
    return Json{{"eps", r.eps},
                {"T_numeric", r.T_numeric},
                {"T_extrapolated", r.T_extrapolated},
                {"h", r.h},
                {"threshold", r.threshold},
                {"a", r.a},
                {"censored", r.censored},
                {"extrapolated", r.extrapolated},
                {"converged", r.converged()}};
}

Json to_json(const ScalingFit& f) {
    return Json{{"slope", f.slope},
                {"intercept", f.intercept},
                {"stderr", f.stderr_slope},
                {"r_squared", f.r_squared},
                {"n_points", f.n_points},
                {"regime", f.regime == FitRegime::PhiLaw ? "PhiLaw" : "PowerLaw"},
                {"theory_slope", f.theory_slope}};
}

Json to_json(const EnvelopeAuditEntry& e) {
    Json j{{"audit", "envelope"},
           {"j", e.j},
           {"checked", e.checked},
           {"skipped", e.skipped},
           {"violations", e.violations},
           {"beyond_threshold", e.beyond_threshold},
           {"worst_margin", e.worst_margin}};
    if (!e.message.empty()) j["message"] = e.message;
    return j;
}

Json to_json(const SeedAudit& s) {
    return Json{{"audit", "linear_seed"},
                {"checked", s.checked},
                {"violations", s.violations},
                {"worst_ratio", s.worst_ratio}};
}

Json to_json(const SandwichEntry& s) {
    Json j{{"audit", "sandwich"},
           {"eps", s.eps},
           {"lower", s.lower},
           {"T", s.T},
           {"upper", s.upper},
           {"lower_ratio", s.lower > 0.0 ? Json(s.T / s.lower) : Json(nullptr)},
           {"asserted", s.asserted},
           {"pass", s.pass}};
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

Json to_json(const ExistenceCertificate& c) {
    return Json{{"T_star", finite_or_null(c.T_star)},
                {"contraction_ratio", c.contraction_ratio},
                {"C_a_used", c.C_a_used},
                {"M", c.M},
                {"eps", c.eps},
                {"iterations", c.iterations},
                {"residual", c.residual},
                {"empirical_constant", c.empirical_constant}};
}

Json constants_ledger(double p, double a, double c0, double eps) {
    const IterationConstants c = iteration_constants(p, a, c0, eps);
    const Thresholds th = threshold_constants(p, a, c0);
    const UpperBound ub = upper_lifespan_bound(p, a, c0, eps);
    return Json{{"p", p},
                {"a", a},
                {"c0", c0},
                {"eps", eps},
                {"E", c.E},
                {"F", c.F},
                {"k", c.k},
                {"B", th.B},
                {"eps_cap", th.eps_cap},
                {"S_inf", limit_S(p)},
                {"log_C1", c.log_C1},
                {"upper_lifespan_bound", ub.T},
                {"small_eps_regime", ub.small_eps_regime}};
}

std::string json_lines(std::span<const Json> docs) {
    std::string out;
    for (const Json& d : docs) {
        out += d.dump();
        out += '\n';
    }
    return out;
}

std::string scatter_svg(std::span<const BlowupRecord> records, const ScalingFit& fit) {
    const bool phi_space = fit.regime == FitRegime::PhiLaw;
    std::vector<std::pair<double, double>> pts;
    for (const BlowupRecord& r : records) {
        if (r.censored || !(r.T_extrapolated > 0.0)) continue;
        const double y = phi_space ? phi(r.T_extrapolated) : r.T_extrapolated;
        pts.emplace_back(std::log10(r.eps), std::log10(y));
    }

    constexpr double W = 640, H = 480, L = 70, R = 20, T = 20, B = 60;
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    if (!pts.empty()) {
        x0 = x1 = pts.front().first;
        y0 = y1 = pts.front().second;
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        const double px = std::max(0.05 * (x1 - x0), 0.1);
        const double py = std::max(0.05 * (y1 - y0), 0.1);
        x0 -= px;
        x1 += px;
        y0 -= py;
        y1 += py;
    }
    const auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    if (!pts.empty()) {
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
    }
    // log10 T = log10(e) * intercept + slope * log10 eps
    const double fit_c = fit.intercept / std::log(10.0);
    const double theory_c = my - fit.theory_slope * mx;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
        << H - T - B << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<line class=\"fit\" x1=\"" << fixed(sx(x0)) << "\" y1=\"" << fixed(sy(fit_c + fit.slope * x0))
        << "\" x2=\"" << fixed(sx(x1)) << "\" y2=\"" << fixed(sy(fit_c + fit.slope * x1))
        << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    out << "<line class=\"theory\" x1=\"" << fixed(sx(x0))
        << "\" y1=\"" << fixed(sy(theory_c + fit.theory_slope * x0)) << "\" x2=\"" << fixed(sx(x1))
        << "\" y2=\"" << fixed(sy(theory_c + fit.theory_slope * x1))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
    for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << fixed(sx(x)) << "\" cy=\"" << fixed(sy(y))
            << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    }
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">log10 eps</text>\n";
    out << "<text x=\"20\" y=\"" << H / 2 << "\" transform=\"rotate(-90 20 " << H / 2
        << ")\" text-anchor=\"middle\">" << (phi_space ? "log10 phi(T)" : "log10 T") << "</text>\n";
    out << "<text x=\"" << L + 10 << "\" y=\"" << T + 20 << "\">slope " << fixed(fit.slope)
        << " (theory " << fixed(fit.theory_slope) << ")</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace wavelab
