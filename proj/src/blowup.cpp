#include "wavelab/blowup.hpp"

#include "wavelab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wavelab {

namespace {

constexpr double kLn2 = std::numbers::ln2;

/// log of the regime's base b(x,t) at step j; -inf where it vanishes.
double log_base(const IterationConstants& c, int j, double x, double t) {
    const double d = t - x;
    double b;
    if (c.a < 0.0) {
        if (d - 1.0 <= 0.0) return -std::numeric_limits<double>::infinity();
        return -(c.a + 1.0) * std::log(d) + 2.0 * std::log(d - 1.0);
    }
    if (c.a == 0.0) {
        b = (d - 1.0) * std::log1p(x);
    } else {
        b = d - offset_l(j);
    }
    return b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity();
}

/// log envelope = p^{j-1} Lambda + rest, with
/// Lambda = log C1 - S_j log F + (log E + p log b)/(p-1), rest = -(log E + log b)/(p-1).
/// Written this way so neither term overflows before the product does.
struct LogEnvelope {
    double lambda;
    double value;
};

LogEnvelope log_envelope_split(const IterationConstants& c, double pj1, double S_j, double lb) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (std::isinf(lb)) return {kNegInf, kNegInf};
    const double q = c.p - 1.0;
    const double lambda = c.log_C1 - S_j * std::log(c.F) + (std::log(c.E) + c.p * lb) / q;
    const double rest = -(std::log(c.E) + lb) / q;
    return {lambda, pj1 * lambda + rest};
}

/// Everything in K_i except the eps^p factor and the t-dependent factor.
double log_threshold_core(const IterationConstants& c) {
    const double p = c.p;
    const double a = c.a;
    const double q = p - 1.0;
    const double S = limit_S(p);
    const double base = p * std::log(c.c0) + std::log(c.E) / q;
    if (a < 0.0) return base + (-(a + 4.0) + p * (a - 3.0) / q) * kLn2 - 2.0 * S * std::log(p);
    if (a == 0.0) return base + (-1.0 - 3.0 * p / q) * kLn2 - 2.0 * S * std::log(p);
    return base + (-(a + 2.0) - 2.0 * p / q) * kLn2 - S * std::log(2.0 * p);
}

}  // namespace

bool Region::contains(double x, double t) const noexcept {
    if (x < 0.0 || t < 0.0) return false;
    const double d = t - x;
    switch (kind) {
    case RegionKind::Gamma1:
        return d >= 1.0;
    case RegionKind::Gamma2:
        return x >= d && d >= 1.0;
    case RegionKind::Sigma:
        return d >= offset_l(j);
    }
    return false;
}

double offset_l(int j) {
    if (j <= 1) return 3.0;
    return 5.0 - std::ldexp(1.0, 2 - j);
}

double exponent_a(double p, int j) { return (std::pow(p, j) - 1.0) / (p - 1.0); }

double partial_sum_S(double p, int j) {
    double s = 0.0;
    double pi = 1.0;
    for (int i = 1; i < j; ++i) {
        pi *= p;
        s += i / pi;
    }
    return s;
}

IterationConstants iteration_constants(double p, double a, double c0, double eps) {
    IterationConstants c;
    c.p = p;
    c.a = a;
    c.c0 = c0;
    c.eps = eps;
    const double q = p - 1.0;
    if (a < 0.0) {
        c.E = q * q / (std::pow(2.0, a + 5.0) * p * p);
        c.F = p * p;
        c.k = std::pow(2.0, -(a + 4.0));
    } else if (a == 0.0) {
        c.E = q * q / (2.0 * p * p);
        c.F = p * p;
        c.k = 0.5;
    } else {
        c.E = q / (std::pow(2.0, a + 2.0) * p);
        c.F = 2.0 * p;
        c.k = std::pow(2.0, -(a + 2.0));
    }
    c.log_C1 = p * std::log(c0 * eps) + std::log(c.k);
    return c;
}

IterationState initial_state(const IterationConstants& consts) {
    return IterationState{1, 1.0, 0.0, consts.log_C1, offset_l(1)};
}

IterationState seq_next(const IterationState& s, const IterationConstants& c) {
    IterationState n;
    n.j = s.j + 1;
    n.log_C_j = c.p * s.log_C_j + std::log(c.E) - s.j * std::log(c.F);
    n.a_j = c.p * s.a_j + 1.0;
    n.S_j = s.S_j + s.j / std::pow(c.p, s.j);
    n.l_j = s.l_j + std::ldexp(1.0, -(s.j - 1));
    return n;
}

double seq_closed_form(int j, const IterationConstants& c) {
    if (j <= 1) return c.log_C1;
    return log_C_closed<double>(j, c);
}

Region envelope_region(double a, int j) {
    if (a < 0.0) return {RegionKind::Gamma2, j};
    if (a == 0.0) return {RegionKind::Gamma1, j};
    return {RegionKind::Sigma, j};
}

std::optional<double> log_envelope(const IterationConstants& c, int j, double x, double t) {
    if (j < 1 || !envelope_region(c.a, j).contains(x, t)) return std::nullopt;
    return log_envelope_split(c, std::pow(c.p, j - 1), partial_sum_S(c.p, j), log_base(c, j, x, t))
        .value;
}

std::optional<double> envelope(const IterationConstants& c, int j, double x, double t) {
    const auto lv = log_envelope(c, j, x, t);
    if (!lv) return std::nullopt;
    return std::exp(*lv);
}

double regime_floor(double a) { return a > 0.0 ? 20.0 : 4.0; }

double blowup_functional(const IterationConstants& c, double eps, double t) {
    if (!(t >= regime_floor(c.a))) {
        throw DomainError("blowup_functional: t below the regime floor");
    }
    const double p = c.p;
    const double q = p - 1.0;
    double time_term;
    if (c.a < 0.0) {
        time_term = p * (1.0 - c.a) / q * std::log(t);
    } else if (c.a == 0.0) {
        time_term = p / q * std::log(phi(t));
    } else {
        time_term = p / q * std::log(t);
    }
    return p * std::log(eps) + log_threshold_core(c) + time_term;
}

Thresholds threshold_constants(double p, double a, double c0) {
    const IterationConstants c = iteration_constants(p, a, c0, 1.0);
    const double q = p - 1.0;
    const double core = log_threshold_core(c);
    Thresholds th;
    if (a < 0.0) {
        th.B = std::exp(-q / (p * (1.0 - a)) * core);
        th.eps_cap = std::pow(th.B / regime_floor(a), (1.0 - a) / q);
    } else if (a == 0.0) {
        th.B = std::exp(-q / p * core);
        th.eps_cap = std::pow(th.B / phi(regime_floor(a)), 1.0 / q);
    } else {
        th.B = std::exp(-q / p * core);
        th.eps_cap = std::pow(th.B / regime_floor(a), 1.0 / q);
    }
    return th;
}

UpperBound upper_lifespan_bound(double p, double a, double c0, double eps) {
    const Thresholds th = threshold_constants(p, a, c0);
    const double q = p - 1.0;
    UpperBound ub;
    if (a < 0.0) {
        ub.T = th.B * std::pow(eps, -q / (1.0 - a));
    } else if (a == 0.0) {
        ub.T = phi_inverse(th.B * std::pow(eps, -q));
    } else {
        ub.T = th.B * std::pow(eps, -q);
    }
    ub.small_eps_regime = eps <= th.eps_cap;
    return ub;
}

UpperBound upper_lifespan_bound(const ProblemSpec& spec) {
    return upper_lifespan_bound(spec.p(), spec.a, data_norms(spec.data).c0, spec.eps);
}

std::optional<int> divergence_index(const IterationConstants& c, double x, double t) {
    const double limit = kDivergenceLog10 * std::numbers::ln10;
    double pj1 = 1.0;
    double S = 0.0;
    for (int j = 1; j <= kDivergenceIndexCap; ++j) {
        if (!envelope_region(c.a, j).contains(x, t)) return std::nullopt;
        const LogEnvelope lv = log_envelope_split(c, pj1, S, log_base(c, j, x, t));
        if (lv.value > limit) return j;
        // Lambda_j only decreases in j: once negative, the envelopes decay for good.
        if (!(lv.lambda >= 0.0)) return std::nullopt;
        S += j / (pj1 * c.p);
        pj1 *= c.p;
        if (std::isinf(pj1)) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace wavelab
