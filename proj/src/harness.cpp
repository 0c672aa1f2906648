#include "wavelab/harness.hpp"

#include "wavelab/errors.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace wavelab {

void LatticeSolution::append(std::size_t level, std::span<const double> row) {
    if (row.size() != n_x_) throw GeometryError("LatticeSolution::append: row length mismatch");
    levels_.push_back(level);
    values_.insert(values_.end(), row.begin(), row.end());
}

GridFunction LatticeSolution::to_grid() const {
    if (row_stride_ != 1) throw GeometryError("to_grid: rows were thinned");
    GridFunction g(h_, x_min_, n_x_, 0);
    for (std::size_t r = 0; r < rows(); ++r) g.append_row(row(r));
    return g;
}

namespace {

/// Three rolling rows centred on x = 0, index j <-> x = (j - half) h.
class RollingRows {
public:
    RollingRows(double a, double h, std::size_t half) : a_(a), h_(h) { resize(half); }

    std::size_t half() const noexcept { return half_; }
    std::size_t size() const noexcept { return 2 * half_ + 1; }
    double x(std::size_t j) const noexcept {
        return h_ * (static_cast<double>(j) - static_cast<double>(half_));
    }

    void grow(std::size_t new_half) {
        const std::size_t shift = new_half - half_;
        for (auto* v : {&prev, &cur, &next}) {
            std::vector<double> w(2 * new_half + 1, 0.0);
            std::copy(v->begin(), v->end(), w.begin() + static_cast<std::ptrdiff_t>(shift));
            *v = std::move(w);
        }
        resize(new_half);
    }

    std::vector<double> prev, cur, next, wt;

private:
    void resize(std::size_t half) {
        half_ = half;
        const std::size_t n = 2 * half + 1;
        prev.resize(n, 0.0);
        cur.resize(n, 0.0);
        next.resize(n, 0.0);
        wt.resize(n);
        for (std::size_t j = 0; j < n; ++j) wt[j] = weight(a_, x(j));
    }

    double a_;
    double h_;
    std::size_t half_ = 0;
};

RowStat row_stat(double t, std::span<const double> v, std::size_t lo, std::size_t hi) {
    RowStat s{t, 0.0, 0.0};
    for (std::size_t j = lo; j <= hi; ++j) {
        s.max_abs = std::max(s.max_abs, std::fabs(v[j]));
        s.min_value = std::min(s.min_value, v[j]);
    }
    return s;
}

void check_finite(std::span<const double> v, std::size_t lo, std::size_t hi, std::size_t level) {
    for (std::size_t j = lo; j <= hi; ++j) {
        if (!std::isfinite(v[j])) {
            std::ostringstream msg;
            msg << "non-finite value at time level " << level;
            throw NumericalOverflow(msg.str(), level);
        }
    }
}

}  // namespace

MarchResult march(const ProblemSpec& spec, double h, double T_max, double threshold,
                  const MarchOptions& options) {
    if (!(h > 0.0) || !(T_max >= 0.0)) throw DomainError("march: need h > 0 and T_max >= 0");
    const InitialData& data = spec.data;
    const bool compact = data.support_radius.has_value() && !options.half_width;
    const double R = data.support_radius.value_or(options.cutoff);
    const double half_width = options.half_width.value_or(R + T_max);
    const auto full_half = static_cast<std::size_t>(std::ceil(half_width / h - 1e-9)) + 2;
    const auto levels = static_cast<std::size_t>(std::llround(T_max / h));
    const auto support_nodes = static_cast<std::size_t>(std::ceil(R / h));

    const bool store = options.store_stride > 0;
    const auto over_limit = [&] {
        throw DomainError("march: requested storage exceeds the limit; raise store_stride");
    };
    if (store && !compact && (levels / options.store_stride + 2) * (2 * full_half + 1) > options.max_stored_values) {
        over_limit();
    }

    // Outside the active band the solution is exactly zero (finite speed).
    const auto active = [&](std::size_t k) {
        return compact ? support_nodes + k + 2 : std::numeric_limits<std::size_t>::max();
    };

    std::size_t start_half = full_half;
    if (compact) start_half = std::min(full_half, active(1) + 64);
    RollingRows rows(spec.a, h, start_half);

    const auto band = [&](std::size_t k) {
        const std::size_t A = std::min(active(k), rows.half());
        return std::pair{rows.half() - A, rows.half() + A};
    };

    MarchResult result;
    result.h = h;
    double min_value = 0.0;

    // Stored rows keep their active band only; they are padded to a common width at the end.
    struct Kept {
        std::size_t level;
        std::vector<double> band;
    };
    std::vector<Kept> kept;
    const auto keep = [&](std::size_t k, const std::vector<double>& v, bool last) {
        if (!store || !(k % options.store_stride == 0 || last)) return;
        if (!kept.empty() && kept.back().level == k) return;
        const std::size_t A = std::min(active(k), rows.half());
        if ((kept.size() + 1) * (2 * std::min(full_half, active(k)) + 1) > options.max_stored_values) {
            over_limit();
        }
        const auto first = v.begin() + static_cast<std::ptrdiff_t>(rows.half() - A);
        kept.push_back({k, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(2 * A + 1))});
    };
    const auto finish = [&] {
        if (store && !kept.empty()) {
            const std::size_t half = std::min(full_half, active(kept.back().level));
            result.solution =
                LatticeSolution(h, -h * static_cast<double>(half), 2 * half + 1, options.store_stride);
            std::vector<double> row(2 * half + 1);
            for (const Kept& r : kept) {
                std::fill(row.begin(), row.end(), 0.0);
                const std::size_t A = (r.band.size() - 1) / 2;
                std::copy(r.band.begin(), r.band.end(), row.begin() + static_cast<std::ptrdiff_t>(half - A));
                result.solution.append(r.level, row);
            }
        }
        result.min_value = min_value;
        return std::move(result);
    };

    const double eps = spec.eps;
    const Nonlinearity& F = spec.nonlinearity;
    const auto& S = options.forcing;
    const double h2 = h * h;

    const auto finish_row = [&](std::size_t k, const std::vector<double>& v) {
        const auto [lo, hi] = band(k);
        check_finite(v, lo, hi, k);
        const RowStat st = row_stat(h * static_cast<double>(k), v, lo, hi);
        result.history.push_back(st);
        min_value = std::min(min_value, st.min_value);
        const bool blown = st.max_abs >= threshold;
        if (blown) result.blowup_row = k;
        keep(k, v, blown || k == levels);
        return blown;
    };

    // Level 0: eps f.
    {
        const auto [lo, hi] = band(0);
        if (!data.f_is_zero && eps != 0.0) {
            for (std::size_t j = lo; j <= hi; ++j) rows.cur[j] = eps * data.f(rows.x(j));
        }
        if (finish_row(0, rows.cur) || levels == 0) return finish();
    }

    // Level 1: free part plus the base-triangle vertex rule, implicit in the apex.
    {
        const auto [lo, hi] = band(1);
        const auto Hprev = [&](std::size_t j) {
            if (j >= rows.size()) return 0.0;
            double v = rows.wt[j] * F(rows.cur[j]);
            if (S) v += S(rows.x(j), 0.0);
            return v;
        };
        for (std::size_t j = lo; j <= hi; ++j) {
            const double x = rows.x(j);
            double base = eps == 0.0 ? 0.0 : eps * free_solution(data, x, h);
            base += h2 / 6.0 * ((j > 0 ? Hprev(j - 1) : 0.0) + Hprev(j + 1));
            if (S) base += h2 / 6.0 * S(x, h);
            double v = base;
            for (int it = 0; it < 50; ++it) {
                const double nv = base + h2 / 6.0 * rows.wt[j] * F(v);
                const bool done = std::fabs(nv - v) <= 1e-16 * std::fabs(nv);
                v = nv;
                if (done) break;
            }
            rows.next[j] = v;
        }
        std::swap(rows.prev, rows.cur);
        std::swap(rows.cur, rows.next);
        if (finish_row(1, rows.cur)) return finish();
    }

    for (std::size_t k = 1; k < levels; ++k) {
        if (compact && active(k + 1) + 1 > rows.half() && rows.half() < full_half) {
            rows.grow(std::min(full_half, 2 * rows.half()));
        }
        const auto [lo, hi] = band(k + 1);
        const std::size_t n = rows.size();
        const double* um = rows.prev.data();
        const double* u = rows.cur.data();
        double* up = rows.next.data();
        const double* w = rows.wt.data();
        const double t = h * static_cast<double>(k);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double left = j > 0 ? u[j - 1] : 0.0;
            const double right = j + 1 < n ? u[j + 1] : 0.0;
            double src = w[j] * F(u[j]);
            if (S) src += S(rows.x(j), t);
            up[j] = left + right - um[j] + h2 * src;
        }
        std::swap(rows.prev, rows.cur);
        std::swap(rows.cur, rows.next);
        if (finish_row(k + 1, rows.cur)) break;
    }
    return finish();
}

double extrapolate_blowup_time(std::span<const RowStat> history, double p) {
    if (history.size() < 3) throw ExtrapolationError("extrapolation: history too short");
    const double top = history.back().max_abs;
    if (!(top > 0.0) || !std::isfinite(top)) {
        throw ExtrapolationError("extrapolation: final maximum is not positive");
    }
    const double q = p - 1.0;
    std::vector<double> ts, ws;
    std::size_t k = history.size() - 1;
    std::size_t lowest = k;
    const int n_top = static_cast<int>(std::floor(std::log2(top)));
    for (int n = n_top; ts.size() < 10 && n > n_top - 400; --n) {
        const double L = std::ldexp(1.0, n);
        while (k > 0 && history[k - 1].max_abs >= L) --k;
        if (k == 0) break;
        const double w0 = std::pow(history[k - 1].max_abs, -q);
        const double w1 = std::pow(history[k].max_abs, -q);
        const double wl = std::pow(L, -q);
        const double t0 = history[k - 1].t;
        const double t1 = history[k].t;
        const double frac = std::isinf(w0) ? 1.0 : (w0 - wl) / (w0 - w1);
        ts.push_back(t0 + frac * (t1 - t0));
        ws.push_back(wl);
        lowest = k;
    }
    if (ts.size() < 5) {
        throw ExtrapolationError("extrapolation: fewer than 5 level crossings");
    }
    for (std::size_t i = lowest; i < history.size(); ++i) {
        if (!(history[i].max_abs > history[i - 1].max_abs)) {
            throw ExtrapolationError("extrapolation: maximum is not increasing near blow-up");
        }
    }
    const double n = static_cast<double>(ts.size());
    double mt = 0.0, mw = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        mw += ws[i];
    }
    mt /= n;
    mw /= n;
    double stt = 0.0, stw = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stw += (ts[i] - mt) * (ws[i] - mw);
    }
    if (!(stt > 0.0)) throw ExtrapolationError("extrapolation: degenerate crossing times");
    const double slope = stw / stt;
    if (!(slope < 0.0)) throw ExtrapolationError("extrapolation: w does not decrease");
    const double root = mt - mw / slope;
    return std::max(root, 0.0);
}

BlowupRecord measure_blowup(const ProblemSpec& spec, double h, double T_max, double threshold) {
    const MarchResult m = march(spec, h, T_max, threshold);
    BlowupRecord r;
    r.eps = spec.eps;
    r.h = h;
    r.threshold = threshold;
    r.a = spec.a;
    r.censored = !m.blowup_row.has_value();
    r.T_numeric = m.history.back().t;
    r.T_extrapolated = r.T_numeric;
    if (!r.censored) {
        try {
            r.T_extrapolated = extrapolate_blowup_time(m.history, spec.p());
            r.extrapolated = true;
        } catch (const ExtrapolationError&) {
            r.extrapolated = false;
        }
    }
    return r;
}

std::vector<BlowupRecord> epsilon_sweep(const ProblemSpec& spec_template,
                                        std::span<const double> eps_list, double h,
                                        double threshold, unsigned jobs) {
    std::vector<double> eps(eps_list.begin(), eps_list.end());
    std::sort(eps.begin(), eps.end());
    const double c0 = data_norms(spec_template.data).c0;
    std::vector<BlowupRecord> out(eps.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (std::size_t i = next++; i < eps.size(); i = next++) {
            try {
                ProblemSpec s = spec_template;
                s.eps = eps[i];
                const double T_max =
                    3.0 * upper_lifespan_bound(s.p(), s.a, c0, s.eps).T;
                out[i] = measure_blowup(s, h, T_max, threshold);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, eps.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<double> geometric_eps(double eps_start, int count, double ratio) {
    std::vector<double> v;
    double e = eps_start;
    for (int k = 0; k < count; ++k, e *= ratio) v.push_back(e);
    return v;
}

double eps_for_scale(double p, double a, double T_target) {
    const double q = p - 1.0;
    if (a < 0.0) return std::pow(T_target, -(1.0 - a) / q);
    if (a == 0.0) return std::pow(phi(T_target), -1.0 / q);
    return std::pow(T_target, -1.0 / q);
}

double theory_slope(double a, double p) {
    const double q = p - 1.0;
    return a < 0.0 ? -q / (1.0 - a) : -q;
}

ScalingFit fit_scaling(std::span<const BlowupRecord> records, double a, double p) {
    std::vector<double> xs, ys;
    for (const BlowupRecord& r : records) {
        if (r.censored || !(r.T_extrapolated > 0.0) || !(r.eps > 0.0)) continue;
        xs.push_back(std::log(r.eps));
        ys.push_back(a == 0.0 ? std::log(phi(r.T_extrapolated)) : std::log(r.T_extrapolated));
    }
    if (xs.size() < 4) {
        std::ostringstream msg;
        msg << "fit_scaling: " << xs.size() << " uncensored points, need at least 4";
        throw InsufficientData(msg.str());
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientData("fit_scaling: all eps equal");
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.stderr_slope = std::sqrt(sse / (n - 2.0) / sxx);
    fit.n_points = xs.size();
    fit.regime = a == 0.0 ? FitRegime::PhiLaw : FitRegime::PowerLaw;
    fit.theory_slope = theory_slope(a, p);
    return fit;
}

std::vector<EnvelopeAuditEntry> envelope_audit(const LatticeSolution& solution,
                                               const IterationConstants& consts, int j_max,
                                               double threshold) {
    const double tol = 10.0 * solution.h();
    std::vector<EnvelopeAuditEntry> out;
    for (int j = 1; j <= j_max; ++j) {
        EnvelopeAuditEntry e;
        e.j = j;
        e.worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < solution.rows(); ++r) {
            const double t = solution.t(r);
            for (std::size_t i = 0; i < solution.n_x(); ++i) {
                const auto env = envelope(consts, j, solution.x(i), t);
                if (!env) {
                    ++e.skipped;
                    continue;
                }
                if (*env > threshold) {
                    ++e.beyond_threshold;
                    continue;
                }
                ++e.checked;
                const double margin = solution(i, r) - *env * (1.0 - tol);
                e.worst_margin = std::min(e.worst_margin, margin);
                if (margin < 0.0) ++e.violations;
            }
        }
        if (e.checked == 0) e.worst_margin = 0.0;
        if (e.beyond_threshold > 0) {
            std::ostringstream msg;
            msg << "solution blew up before envelope applicable at " << e.beyond_threshold
                << " nodes";
            e.message = msg.str();
        }
        out.push_back(std::move(e));
    }
    return out;
}

SeedAudit linear_seed_audit(const LatticeSolution& solution, double eps, double c0) {
    const double seed = eps * c0;
    const double floor = seed * (1.0 - 5.0 * solution.h());
    const Region gamma1{RegionKind::Gamma1, 1};
    SeedAudit audit;
    audit.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < solution.rows(); ++r) {
        for (std::size_t i = 0; i < solution.n_x(); ++i) {
            if (!gamma1.contains(solution.x(i), solution.t(r))) continue;
            ++audit.checked;
            const double u = solution(i, r);
            audit.worst_ratio = std::min(audit.worst_ratio, u / seed);
            if (u < floor) ++audit.violations;
        }
    }
    if (audit.checked == 0) audit.worst_ratio = 0.0;
    return audit;
}

std::vector<SandwichEntry> sandwich_check(std::span<const BlowupRecord> records,
                                          const ProblemSpec& spec_template) {
    const double c0 = data_norms(spec_template.data).c0;
    std::vector<SandwichEntry> out;
    for (const BlowupRecord& r : records) {
        ProblemSpec s = spec_template;
        s.eps = r.eps;
        const UpperBound ub = upper_lifespan_bound(s.p(), s.a, c0, s.eps);
        SandwichEntry e;
        e.eps = r.eps;
        e.T = r.T_extrapolated;
        e.upper = ub.T;
        e.lower = self_consistent_horizon(s).T;
        if (r.censored) {
            e.note = "censored";
        } else if (!ub.small_eps_regime) {
            e.note = "eps above eps_cap";
        } else {
            e.asserted = true;
            e.pass = e.lower <= e.T && e.T <= (1.0 + kSandwichTolerance) * e.upper;
            if (!e.pass) e.note = e.T < e.lower ? "below certified horizon" : "above upper bound";
        }
        out.push_back(std::move(e));
    }
    return out;
}

double h_robustness_shift(const ProblemSpec& spec, double h, double T_max, double threshold) {
    const BlowupRecord coarse = measure_blowup(spec, h, T_max, threshold);
    const BlowupRecord fine = measure_blowup(spec, 0.5 * h, T_max, threshold);
    return std::fabs(fine.T_extrapolated - coarse.T_extrapolated) / fine.T_extrapolated;
}

}  // namespace wavelab
