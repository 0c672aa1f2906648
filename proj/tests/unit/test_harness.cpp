#include "wavelab/errors.hpp"
#include "wavelab/harness.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace wavelab;

namespace {

ProblemSpec blowup_spec(double a, double eps, double p = 2.0) {
    ProblemSpec s;
    s.a = a;
    s.eps = eps;
    s.nonlinearity = Nonlinearity::abs_pow(p);
    s.data = builtin_blowup_data();
    s.mode = Mode::Blowup;
    return s;
}

std::vector<RowStat> synthetic_history(double T, double p, int n) {
    std::vector<RowStat> h;
    for (int k = 0; k < n; ++k) {
        const double t = T * (1.0 - std::pow(0.5, 0.05 * k));
        h.push_back({t, std::pow(T - t, -1.0 / (p - 1.0)), 0.0});
    }
    return h;
}

BlowupRecord record(double eps, double T, bool censored = false) {
    BlowupRecord r;
    r.eps = eps;
    r.T_numeric = T;
    r.T_extrapolated = T;
    r.censored = censored;
    r.extrapolated = !censored;
    return r;
}

/// Sup over |x| <= 5 of the error against u*(x, 1) = exp(-x^2) / 2.
double manufactured_error(double h) {
    ProblemSpec s;
    s.a = 1.0;
    s.eps = 1.0;
    s.nonlinearity = Nonlinearity::abs_pow(2.0);
    s.data = InitialData::from_functions(
        "gauss", [](double x) { return std::exp(-x * x); }, [](double x) { return -std::exp(-x * x); },
        std::nullopt);
    s.mode = Mode::Existence;
    MarchOptions opt;
    opt.half_width = 10.0;
    opt.store_stride = 1;
    opt.forcing = [](double x, double t) {
        const double g = std::exp(-x * x);
        const double u = g / (1.0 + t);
        const double utt = 2.0 * g / std::pow(1.0 + t, 3.0);
        const double uxx = (4.0 * x * x - 2.0) * g / (1.0 + t);
        return utt - uxx - u * u / (1.0 + x * x);
    };
    const MarchResult m = march(s, h, 1.0, 1e30, opt);
    const LatticeSolution& L = m.solution;
    const std::size_t r = L.rows() - 1;
    REQUIRE(L.t(r) == doctest::Approx(1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < L.n_x(); ++i) {
        const double x = L.x(i);
        if (std::fabs(x) <= 5.0) err = std::max(err, std::fabs(L(i, r) - 0.5 * std::exp(-x * x)));
    }
    return err;
}

}  // namespace

TEST_CASE("march reproduces the free solution when F vanishes") {
    ProblemSpec s = blowup_spec(0.0, 0.3);
    s.nonlinearity = Nonlinearity::zero(2.0);
    s.data = InitialData::from_functions(
        "two-bumps", [](double y) { return std::fabs(y) < 1.0 ? std::pow(1.0 - y * y, 3.0) : 0.0; },
        builtin_blowup_data().g, 1.0);
    for (double h : {0.05, 0.01}) {
        MarchOptions opt;
        opt.store_stride = 1;
        const MarchResult m = march(s, h, 3.0, 1e30, opt);
        double worst = 0.0;
        for (std::size_t r = 0; r < m.solution.rows(); ++r) {
            for (std::size_t i = 0; i < m.solution.n_x(); ++i) {
                const double exact = s.eps * free_solution(s.data, m.solution.x(i), m.solution.t(r));
                worst = std::max(worst, std::fabs(m.solution(i, r) - exact));
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("manufactured solution converges at second order") {
    const double e1 = manufactured_error(0.04);
    const double e2 = manufactured_error(0.02);
    const double e3 = manufactured_error(0.01);
    const double o1 = std::log2(e1 / e2);
    const double o2 = std::log2(e2 / e3);
    CAPTURE(o1);
    CAPTURE(o2);
    CHECK(o1 >= 1.7);
    CHECK(o1 <= 2.2);
    CHECK(o2 >= 1.7);
    CHECK(o2 <= 2.2);
}

TEST_CASE("march is the fixed point of the discrete integral equation") {
    for (double a : {-1.0, 1.0}) {
        ProblemSpec s = blowup_spec(a, 0.05);
        s.mode = Mode::Existence;
        const PicardResult pr = picard_solve(s, 0.1, 4.0, 1e-15);
        MarchOptions opt;
        opt.store_stride = 1;
        const MarchResult m = march(s, 0.1, 4.0, 1e30, opt);
        const GridFunction g = m.solution.to_grid();
        REQUIRE(g.same_geometry(pr.u));
        CHECK(sup_distance(g, pr.u) < 1e-14);
    }
}

TEST_CASE("blow-up run stays nonnegative and reaches the threshold") {
    const MarchResult m = march(blowup_spec(1.0, 0.5), 0.05, 200.0, 1e6);
    REQUIRE(m.blowup_row.has_value());
    CHECK(m.history.back().max_abs >= 1e6);
    CHECK(m.min_value >= 0.0);
    CHECK(m.history.size() == *m.blowup_row + 1);
}

TEST_CASE("row storage with a stride") {
    MarchOptions opt;
    opt.store_stride = 5;
    const MarchResult m = march(blowup_spec(1.0, 0.05), 0.1, 2.3, 1e6, opt);
    const LatticeSolution& L = m.solution;
    REQUIRE(L.rows() == 6);
    for (std::size_t r = 0; r + 1 < L.rows(); ++r) CHECK(L.level(r) == 5 * r);
    CHECK(L.level(5) == 23);
    CHECK_THROWS_AS(L.to_grid(), GeometryError);
    MarchOptions huge;
    huge.store_stride = 1;
    huge.max_stored_values = 1000;
    CHECK_THROWS_AS(march(blowup_spec(1.0, 0.05), 0.1, 50.0, 1e6, huge), DomainError);
}

TEST_CASE("non-finite values raise an overflow error with the row") {
    try {
        march(blowup_spec(-1.0, 1.0, 3.0), 0.1, 100.0, std::numeric_limits<double>::infinity());
        FAIL("expected NumericalOverflow");
    } catch (const NumericalOverflow& e) {
        CHECK(e.row() > 1);
    }
}

TEST_CASE("extrapolation on exact models") {
    CHECK(extrapolate_blowup_time(synthetic_history(1.0, 2.0, 500), 2.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(extrapolate_blowup_time(synthetic_history(2.0, 3.0, 500), 3.0) == doctest::Approx(2.0).epsilon(1e-6));

    std::vector<RowStat> bumpy = synthetic_history(1.0, 2.0, 500);
    bumpy[bumpy.size() - 3].max_abs = bumpy.back().max_abs * 2.0;
    CHECK_THROWS_AS(extrapolate_blowup_time(bumpy, 2.0), ExtrapolationError);
    CHECK_THROWS_AS(extrapolate_blowup_time(synthetic_history(1.0, 2.0, 20), 2.0), ExtrapolationError);
    CHECK_THROWS_AS(extrapolate_blowup_time(std::vector<RowStat>{}, 2.0), ExtrapolationError);
}

TEST_CASE("extrapolated time is threshold independent") {
    const ProblemSpec s = blowup_spec(1.0, 0.5);
    const BlowupRecord lo = measure_blowup(s, 0.05, 200.0, 1e4);
    const BlowupRecord hi = measure_blowup(s, 0.05, 200.0, 1e6);
    REQUIRE(lo.converged());
    REQUIRE(hi.converged());
    CHECK(std::fabs(lo.T_extrapolated - hi.T_extrapolated) <= 0.02 * hi.T_extrapolated);
    CHECK(hi.T_extrapolated >= 0.0);
    CHECK(hi.T_numeric >= hi.T_extrapolated - hi.h);
}

TEST_CASE("epsilon sweep") {
    const ProblemSpec s = blowup_spec(1.0, 1.0);
    const std::vector<double> eps = geometric_eps(0.05, 6, 0.5);
    const auto records = epsilon_sweep(s, eps, 0.1, 1e6, 2);
    REQUIRE(records.size() == 6);
    for (std::size_t k = 1; k < records.size(); ++k) {
        CHECK(records[k].eps > records[k - 1].eps);
        CHECK(records[k].T_extrapolated < records[k - 1].T_extrapolated);
    }
    for (const auto& r : records) CHECK_FALSE(r.censored);

    const std::vector<double> big{5.0};
    const auto fast = epsilon_sweep(s, big, 0.05, 1e6, 1);
    REQUIRE(fast.size() == 1);
    CHECK(fast[0].T_extrapolated < 4.0);

    CHECK(epsilon_sweep(s, std::vector<double>{}, 0.1, 1e6).empty());

    const BlowupRecord cut = measure_blowup(blowup_spec(1.0, 0.01), 0.1, 5.0, 1e6);
    CHECK(cut.censored);
    CHECK_FALSE(cut.converged());
    CHECK(cut.T_numeric == doctest::Approx(5.0));
}

TEST_CASE("scaling fits") {
    std::vector<BlowupRecord> rs;
    for (double e : geometric_eps(0.1, 6, 0.5)) rs.push_back(record(e, std::pow(e, -0.5)));
    const ScalingFit f = fit_scaling(rs, -1.0, 2.0);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.n_points == 6);
    CHECK(f.regime == FitRegime::PowerLaw);
    CHECK(f.theory_slope == -0.5);

    std::vector<BlowupRecord> r0;
    for (double e : geometric_eps(0.01, 6, 0.5)) r0.push_back(record(e, phi_inverse(1.0 / e)));
    const ScalingFit f0 = fit_scaling(r0, 0.0, 2.0);
    CHECK(f0.slope == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(f0.regime == FitRegime::PhiLaw);

    rs[0].censored = true;
    rs[1].censored = true;
    rs[2].censored = true;
    CHECK_THROWS_AS(fit_scaling(rs, -1.0, 2.0), InsufficientData);
    CHECK(theory_slope(-0.5, 2.0) == doctest::Approx(-2.0 / 3.0));
    CHECK(theory_slope(1.0, 3.0) == -2.0);
}

TEST_CASE("envelope and seed audits on a blow-up run") {
    for (double a : {-1.0, 0.0, 1.0}) {
        const double eps = 0.05;
        const ProblemSpec s = blowup_spec(a, eps);
        MarchOptions opt;
        opt.store_stride = 1;
        const MarchResult m = march(s, 0.1, 400.0, 1e6, opt);
        REQUIRE(m.blowup_row.has_value());
        const IterationConstants c = iteration_constants(2.0, a, 0.5, eps);
        const auto audit = envelope_audit(m.solution, c, 3, 1e6);
        REQUIRE(audit.size() == 3);
        const std::size_t total = m.solution.rows() * m.solution.n_x();
        for (const auto& e : audit) {
            CAPTURE(a);
            CAPTURE(e.j);
            CHECK(e.violations == 0);
            CHECK(e.checked > 0);
            CHECK(e.checked + e.skipped + e.beyond_threshold == total);
            std::size_t outside = 0;
            for (std::size_t r = 0; r < m.solution.rows(); ++r) {
                for (std::size_t i = 0; i < m.solution.n_x(); ++i) {
                    if (!envelope_region(a, e.j).contains(m.solution.x(i), m.solution.t(r))) ++outside;
                }
            }
            CHECK(e.skipped == outside);
        }
        const SeedAudit seed = linear_seed_audit(m.solution, eps, 0.5);
        CHECK(seed.checked > 0);
        CHECK(seed.violations == 0);
        CHECK(seed.worst_ratio >= 1.0 - 0.5);
    }
}

TEST_CASE("envelope beyond the threshold is reported, not counted") {
    const IterationConstants c = iteration_constants(2.0, 1.0, 0.5, 0.5);
    LatticeSolution L(1.0, 6e5, 4, 1);
    const std::vector<double> row(4, 1.0);
    L.append(1'000'000, row);
    const auto j = divergence_index(c, L.x(0), L.t(0));
    REQUIRE(j.has_value());
    const auto audit = envelope_audit(L, c, *j, 1e6);
    const auto& last = audit.back();
    CHECK(last.beyond_threshold > 0);
    CHECK(last.checked + last.skipped + last.beyond_threshold == 4);
    CHECK(last.message.find("blew up before envelope applicable") != std::string::npos);
    CHECK(audit.front().message.empty() == (audit.front().beyond_threshold == 0));
}

TEST_CASE("sandwich bookkeeping") {
    const ProblemSpec s = blowup_spec(1.0, 0.01);
    const double eps = 0.005;
    ProblemSpec at = s;
    at.eps = eps;
    const double lower = self_consistent_horizon(at).T;
    const double upper = upper_lifespan_bound(2.0, 1.0, 0.5, eps).T;
    REQUIRE(lower < upper);
    const double mid = 0.5 * (lower + upper);
    std::vector<BlowupRecord> rs{record(eps, mid), record(0.01, 150.0, true), record(100.0, 0.5)};
    const auto out = sandwich_check(rs, s);
    REQUIRE(out.size() == 3);
    CHECK(out[0].asserted);
    CHECK(out[0].pass);
    CHECK(out[0].lower == doctest::Approx(lower));
    CHECK(out[0].upper == doctest::Approx(upper));
    CHECK_FALSE(out[1].asserted);
    CHECK(out[1].note == "censored");
    CHECK_FALSE(out[2].asserted);
    CHECK(out[2].note == "eps above eps_cap");

    const std::vector<BlowupRecord> too_late{record(eps, 1.3 * upper)};
    CHECK_FALSE(sandwich_check(too_late, s)[0].pass);
    const std::vector<BlowupRecord> too_early{record(eps, 0.5 * lower)};
    CHECK_FALSE(sandwich_check(too_early, s)[0].pass);
}

TEST_CASE("h robustness of the blow-up time") {
    CHECK(h_robustness_shift(blowup_spec(1.0, 0.01), 0.1, 1000.0, 1e6) < 0.05);
    CHECK(eps_for_scale(2.0, 1.0, 50.0) == doctest::Approx(0.02));
    CHECK(eps_for_scale(2.0, -1.0, 50.0) == doctest::Approx(std::pow(50.0, -2.0)));
}
