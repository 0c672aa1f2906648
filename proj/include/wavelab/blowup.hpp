#pragma once

#include "wavelab/problem.hpp"

#include <cmath>
#include <optional>

namespace wavelab {

/// Case-table constants of the lower-bound iteration, for one (p, a, c0, eps).
struct IterationConstants {
    double p = 2.0;
    double a = 0.0;
    double E = 0.0;
    double F = 0.0;
    double k = 0.0;
    double c0 = 0.0;
    double eps = 0.0;
    double log_C1 = 0.0;  ///< log(c0^p k eps^p)
};

/// One step of the sequence: exponent a_j, partial sum S_j, log C_j, offset l_j.
struct IterationState {
    int j = 1;
    double a_j = 1.0;
    double S_j = 0.0;
    double log_C_j = 0.0;
    double l_j = 3.0;
};

enum class RegionKind { Gamma1, Gamma2, Sigma };

/// Gamma1: x >= 0, t-x >= 1. Gamma2: x >= t-x >= 1. Sigma_j: x >= 0, t-x >= l_j.
struct Region {
    RegionKind kind = RegionKind::Gamma1;
    int j = 1;  ///< only for Sigma

    bool contains(double x, double t) const noexcept;
};

/// l_1 = 3, l_j = 5 - 2^{2-j}.
double offset_l(int j);

/// a_j = (p^j - 1)/(p - 1).
double exponent_a(double p, int j);

/// S_j = sum_{i=1}^{j-1} i / p^i.
double partial_sum_S(double p, int j);

/// S = lim S_j = p / (p-1)^2.
inline double limit_S(double p) { return p / ((p - 1.0) * (p - 1.0)); }

IterationConstants iteration_constants(double p, double a, double c0, double eps);

/// State at j = 1.
IterationState initial_state(const IterationConstants& consts);

/// log C_{j+1} = p log C_j + log E - j log F, and the companions a, S, l.
IterationState seq_next(const IterationState& state, const IterationConstants& consts);

/// log C_j from the closed form (any j >= 1; j = 1 returns log_C1).
double seq_closed_form(int j, const IterationConstants& consts);

/// Closed form for log C_j evaluated in Real (double or a multiprecision float).
template <typename Real>
Real log_C_closed(int j, const IterationConstants& c) {
    using std::log;
    const Real p = c.p;
    const Real log_C1 = p * log(Real(c.c0) * Real(c.eps)) + log(Real(c.k));
    if (j <= 1) return log_C1;
    Real S = 0, pi = 1, pj1 = 1;
    for (int i = 1; i < j; ++i) {
        pi *= p;
        S += Real(i) / pi;
        pj1 *= p;
    }
    const Real log_E = log(Real(c.E));
    return pj1 * (log_C1 - S * log(Real(c.F)) + log_E / (p - 1)) - log_E / (p - 1);
}

/// log C_j by chaining log C_{i+1} = p log C_i + log E - i log F from log C_1, in Real.
template <typename Real>
Real log_C_chained(int j, const IterationConstants& c) {
    using std::log;
    const Real p = c.p;
    Real v = p * log(Real(c.c0) * Real(c.eps)) + log(Real(c.k));
    for (int i = 1; i < j; ++i) v = p * v + log(Real(c.E)) - Real(i) * log(Real(c.F));
    return v;
}

/// The region on which the regime's lower bound holds.
Region envelope_region(double a, int j);

/// Lower bound for u at (x,t) from the j-th iterate in the regime consts.a,
/// or nullopt outside the region. Exponentiated from log space; may underflow to 0.
std::optional<double> envelope(const IterationConstants& consts, int j, double x, double t);

/// log of the envelope value (-inf where the base vanishes); nullopt outside the region.
std::optional<double> log_envelope(const IterationConstants& consts, int j, double x, double t);

/// Divergence functional K_i(t) of the regime consts.a, evaluated for eps
/// (overriding consts.eps). K_i(t) > 0 forces the envelopes at (t/2, t) to
/// diverge as j grows. t must be >= regime_floor(a); throws DomainError otherwise.
double blowup_functional(const IterationConstants& consts, double eps, double t);

/// Smallest time accepted by blowup_functional: 4 for a <= 0, 20 for a > 0.
double regime_floor(double a);

struct Thresholds {
    double B = 0.0;
    double eps_cap = 0.0;  ///< largest eps whose predicted bound still reaches the floor
};

Thresholds threshold_constants(double p, double a, double c0);

struct UpperBound {
    double T = 0.0;
    bool small_eps_regime = true;  ///< eps <= eps_cap
};

/// B eps^{-(p-1)/(1-a)} (a < 0), phi^{-1}(B eps^{-(p-1)}) (a = 0), B eps^{-(p-1)} (a > 0).
UpperBound upper_lifespan_bound(const ProblemSpec& spec);

/// Same, with c0 supplied (skips recomputing it from the data).
UpperBound upper_lifespan_bound(double p, double a, double c0, double eps);

inline constexpr int kDivergenceIndexCap = 10000;
inline constexpr double kDivergenceLog10 = 100.0;

/// Smallest j <= 10^4 whose envelope at (x,t) exceeds 1e100, nullopt when
/// the sequence decays (or (x,t) is outside every region).
std::optional<int> divergence_index(const IterationConstants& consts, double x, double t);

}  // namespace wavelab
