#include "wavelab/picard.hpp"

#include "wavelab/errors.hpp"
#include "wavelab/integrate.hpp"
#include "wavelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wavelab {

namespace {

double data_M(const InitialData& d) { return d.sup_f + d.l1_g; }

/// Right-hand side R of D(T) <= R in the existence condition.
double horizon_budget(const ProblemSpec& spec, double C_a) {
    const double p = spec.p();
    const double M = data_M(spec.data);
    const double amp = std::pow(M * spec.eps, p - 1.0);
    if (amp == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (std::pow(2.0, p + 1.0) * p * C_a * amp);
}

/// eps * (tail of |g| beyond the cutoff + sup |f| beyond it); zero for compact data.
double truncation_tail(const ProblemSpec& spec, double cutoff) {
    const InitialData& d = spec.data;
    if (d.support_radius || spec.eps == 0.0) return 0.0;
    const auto abs_g = [&](double y) { return std::fabs(d.g(y)); };
    const double inf = std::numeric_limits<double>::infinity();
    double tail = integrate(abs_g, cutoff, inf, 1e-8) + integrate(abs_g, -inf, -cutoff, 1e-8);
    if (!d.f_is_zero) {
        double sup = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double y = cutoff * (1.0 + 4.0 * k / 1000.0);
            sup = std::max({sup, std::fabs(d.f(y)), std::fabs(d.f(-y))});
        }
        tail += sup;
    }
    return spec.eps * tail;
}

}  // namespace

GridFunction solution_lattice(const ProblemSpec& spec, double h, double T, double cutoff) {
    if (!(h > 0.0) || !(T >= 0.0)) throw DomainError("solution_lattice: need h > 0, T >= 0");
    const double R = spec.data.support_radius.value_or(cutoff);
    return make_lattice(h, R + T, T);
}

GridFunction sample_free_grid(const ProblemSpec& spec, const GridFunction& lattice) {
    GridFunction u(lattice.h(), lattice.x_min(), lattice.n_x(), lattice.rows());
    if (spec.eps == 0.0) return u;
    for (std::size_t k = 0; k < u.rows(); ++k) {
        for (std::size_t i = 0; i < u.n_x(); ++i) {
            u(i, k) = spec.eps * free_solution(spec.data, u.x(i), u.t(k));
        }
    }
    return u;
}

GridFunction picard_step(const ProblemSpec& spec, const GridFunction& u_prev,
                         const GridFunction& u0_grid) {
    if (!u_prev.same_geometry(u0_grid)) {
        throw GeometryError("picard_step: u_prev and u0_grid are on different lattices");
    }
    GridFunction source(u_prev.h(), u_prev.x_min(), u_prev.n_x(), u_prev.rows());
    {
        const auto in = u_prev.values();
        auto out = source.values();
        for (std::size_t n = 0; n < in.size(); ++n) out[n] = spec.nonlinearity(in[n]);
    }
    GridFunction next = duhamel_field(spec.a, source);
    const auto base = u0_grid.values();
    auto vals = next.values();
    for (std::size_t n = 0; n < vals.size(); ++n) vals[n] += base[n];
    return next;
}

HorizonResult certified_horizon(const ProblemSpec& spec, double C_a) {
    if (!(C_a > 0.0)) throw DomainError("certified_horizon: C_a must be > 0");
    const double R = horizon_budget(spec, C_a);
    if (std::isinf(R)) return {std::numeric_limits<double>::infinity(), true};
    const double a = spec.a;
    if (damping_profile(a, 0.0) > R) return {0.0, false};
    if (a < 0.0) return {std::pow(R, 1.0 / (1.0 - a)) - 1.0, true};
    if (a == 0.0) return {phi_inverse(R), true};
    return {R - 1.0, true};
}

double certificate_constant(double a, double T) {
    return 2.0 * mass_bound_constant(a, T) * std::max(1.0, std::pow(2.0, 0.5 * (a - 1.0)));
}

HorizonResult self_consistent_horizon(const ProblemSpec& spec) {
    if (std::isinf(horizon_budget(spec, 1.0))) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    const auto holds = [&](double T) {
        return damping_profile(spec.a, T) <= horizon_budget(spec, certificate_constant(spec.a, T));
    };
    double lo = 1e-6;
    if (!holds(lo)) return {0.0, false};
    double hi = 2.0 * lo;
    while (holds(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return {lo, true};
    }
    while (hi - lo > 1e-7 * hi) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return {lo, true};
}

PicardResult picard_solve(const ProblemSpec& spec, double h, double T, std::optional<double> tol) {
    const double M = data_M(spec.data);
    const double bound = M * spec.eps;
    const double tolerance = tol.value_or(1e-8 * bound);

    PicardResult result;
    const GridFunction lattice = solution_lattice(spec, h, T);
    const GridFunction u0 = sample_free_grid(spec, lattice);

    const auto check_bound = [&](double norm, int n) {
        if (norm > 4.0 * bound * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "Picard iterate " << n << " has sup norm " << norm << " > 4 M eps = " << 4.0 * bound;
            throw IterationDiverged(msg.str());
        }
    };

    GridFunction u = u0;
    result.iterate_norms.push_back(sup_norm(u));
    check_bound(result.iterate_norms.back(), 1);
    bool converged = false;
    for (int n = 1; n <= kPicardMaxIterations; ++n) {
        GridFunction next = picard_step(spec, u, u0);
        const double d = sup_distance(next, u);
        if (!result.differences.empty() && result.differences.back() > 0.0) {
            result.ratios.push_back(d / result.differences.back());
        }
        result.differences.push_back(d);
        result.iterate_norms.push_back(sup_norm(next));
        u = std::move(next);
        result.iterations = n;
        check_bound(result.iterate_norms.back(), n + 1);
        if (d <= tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "Picard iteration did not reach tol " << tolerance << " in " << kPicardMaxIterations
            << " steps (last difference " << result.differences.back() << ")";
        throw IterationStagnated(msg.str());
    }

    result.truncation_tail = truncation_tail(spec, spec.data.support_radius.value_or(20.0));
    result.residual = sup_distance(picard_step(spec, u, u0), u) + result.truncation_tail;
    result.u = std::move(u);

    const double C_used = T > 0.0 ? certificate_constant(spec.a, T) : 0.0;
    const HorizonResult horizon =
        C_used > 0.0 ? certified_horizon(spec, C_used) : HorizonResult{0.0, true};
    result.horizon = horizon.T;
    const double worst =
        result.ratios.empty() ? 0.0 : *std::max_element(result.ratios.begin(), result.ratios.end());
    if (horizon.certified && T <= horizon.T && worst <= 0.5 * (1.0 + kContractionSlack)) {
        ExistenceCertificate cert;
        cert.T_star = horizon.T;
        cert.contraction_ratio = worst;
        cert.C_a_used = C_used;
        cert.M = M;
        cert.eps = spec.eps;
        cert.iterations = result.iterations;
        cert.residual = result.residual;
        result.certificate = cert;
    }
    return result;
}

}  // namespace wavelab
