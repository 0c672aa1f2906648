#include "wavelab/quadrature.hpp"

#include "wavelab/errors.hpp"
#include "wavelab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace wavelab {

namespace {

constexpr double kFreeTolerance = 1e-10;
constexpr double kMassTolerance = 1e-10;

/// Node index of a coordinate that must lie on the lattice.
std::ptrdiff_t snap(double value, double origin, double h, const char* what) {
    const double r = (value - origin) / h;
    const double k = std::round(r);
    if (std::fabs(r - k) > 1e-7) {
        std::ostringstream msg;
        msg << "duhamel_apply: " << what << " = " << value << " is not a lattice node";
        throw GeometryError(msg.str());
    }
    return static_cast<std::ptrdiff_t>(k);
}

/// Odd primitive of (1+|y|)^{-(1+a)}.
double mass_primitive(double a, double y) {
    const double r = std::fabs(y);
    double g;
    if (a == 0.0) {
        g = std::log1p(r);
    } else {
        g = std::expm1(-a * std::log1p(r)) / (-a);
    }
    return y < 0.0 ? -g : g;
}

}  // namespace

double free_solution(const InitialData& data, double x, double t) {
    if (!(t >= 0.0)) throw DomainError("free_solution: t must be >= 0");
    const double lo = x - t;
    const double hi = x + t;
    double value = data.f_is_zero ? 0.0 : 0.5 * (data.f(hi) + data.f(lo));
    if (t == 0.0) return value;
    if (data.g_primitive) {
        value += 0.5 * (data.g_primitive(hi) - data.g_primitive(lo));
        return value;
    }
    std::vector<double> kinks;
    if (data.support_radius) {
        const double r = *data.support_radius;
        if (hi <= -r || lo >= r) return value;
        kinks = {-r, r};
        value += 0.5 * integrate(data.g, std::max(lo, -r), std::min(hi, r), kFreeTolerance, kinks);
        return value;
    }
    value += 0.5 * integrate(data.g, lo, hi, kFreeTolerance);
    return value;
}

double weight_source(const ProblemSpec& spec, double x, double u) {
    return spec.nonlinearity(u) * weight(spec.a, x);
}

double duhamel_apply(double a, const GridFunction& V, const ConeTriangle& cone) {
    const double h = V.h();
    if (V.n_x() == 0 || V.rows() == 0) throw GeometryError("duhamel_apply: empty lattice");
    const auto i0 = snap(cone.apex_x, V.x_min(), h, "apex_x");
    const auto K = snap(cone.apex_t, 0.0, h, "apex_t");
    if (K < 0) throw GeometryError("duhamel_apply: apex_t must be >= 0");
    if (K == 0) return 0.0;
    if (i0 - K < 0 || i0 + K >= static_cast<std::ptrdiff_t>(V.n_x()) ||
        K >= static_cast<std::ptrdiff_t>(V.rows())) {
        throw GeometryError("duhamel_apply: lattice does not cover the cone");
    }
    const auto vw = [&](std::ptrdiff_t i, std::ptrdiff_t k) {
        const auto iu = static_cast<std::size_t>(i);
        return V(iu, static_cast<std::size_t>(k)) * weight(a, V.x(iu));
    };

    // Diamonds centred on rows 1..K-1: K-k of them on row k.
    double diamonds = 0.0;
    for (std::ptrdiff_t k = 1; k < K; ++k) {
        const std::ptrdiff_t reach = K - k - 1;
        for (std::ptrdiff_t m = -reach; m <= reach; m += 2) diamonds += vw(i0 + m, k);
    }
    // Base triangles with apex on row 1.
    double triangles = 0.0;
    for (std::ptrdiff_t m = -(K - 1); m <= K - 1; m += 2) {
        triangles += vw(i0 + m - 1, 0) + vw(i0 + m + 1, 0) + vw(i0 + m, 1);
    }
    return 0.5 * (2.0 * h * h * diamonds + (h * h / 3.0) * triangles);
}

double duhamel_apply(const ProblemSpec& spec, const GridFunction& V, const ConeTriangle& cone) {
    return duhamel_apply(spec.a, V, cone);
}

GridFunction duhamel_field(double a, const GridFunction& V) {
    const std::size_t n = V.n_x();
    const std::size_t rows = V.rows();
    GridFunction W(V.h(), V.x_min(), n, rows);
    if (rows < 2 || n == 0) return W;
    const double h2 = V.h() * V.h();

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = weight(a, V.x(i));
    const auto at = [&](const GridFunction& G, std::ptrdiff_t i, std::size_t k) {
        return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0
                                                              : G(static_cast<std::size_t>(i), k);
    };
    const auto vw = [&](std::ptrdiff_t i, std::size_t k) {
        return (i < 0 || i >= static_cast<std::ptrdiff_t>(n))
                   ? 0.0
                   : V(static_cast<std::size_t>(i), k) * w[static_cast<std::size_t>(i)];
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        W(i, 1) = (h2 / 6.0) * (vw(ii - 1, 0) + vw(ii + 1, 0) + vw(ii, 1));
    }
    for (std::size_t k = 1; k + 1 < rows; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<std::ptrdiff_t>(i);
            W(i, k + 1) = at(W, ii + 1, k) + at(W, ii - 1, k) - W(i, k - 1) + h2 * vw(ii, k);
        }
    }
    return W;
}

double weight_mass(double a, double x, double t) {
    if (!(t >= 0.0)) throw DomainError("weight_mass: t must be >= 0");
    if (t == 0.0) return 0.0;
    const auto slice = [&](double s) {
        return mass_primitive(a, x + t - s) - mass_primitive(a, x - t + s);
    };
    // The slice is a difference of primitives, so allow for its rounding noise.
    const double noise =
        64.0 * std::numeric_limits<double>::epsilon() * t * (1.0 + std::fabs(mass_primitive(a, std::fabs(x) + t)));
    return integrate(slice, 0.0, t, kMassTolerance, {t - x, t + x}, noise);
}

double damping_profile(double a, double tau) {
    if (!(tau >= 0.0)) throw DomainError("damping_profile: tau must be >= 0");
    if (a < 0.0) return std::pow(1.0 + tau, 1.0 - a);
    if (a == 0.0) return phi(tau);
    return 1.0 + tau;
}

double mass_bound_constant(double a, double sample_T, int n_x, int n_t) {
    if (!(sample_T > 0.0)) throw DomainError("mass_bound_constant: sample_T must be > 0");
    n_x = std::max(3, n_x | 1);  // odd, so x = 0 is sampled
    n_t = std::max(2, n_t);
    const double d = damping_profile(a, sample_T);
    const double x_reach = 2.0 * sample_T + 2.0;
    double sup = 0.0;
    for (int jt = 1; jt < n_t; ++jt) {
        const double t = sample_T * jt / (n_t - 1);
        for (int ix = 0; ix < n_x; ++ix) {
            const double x = -x_reach + 2.0 * x_reach * ix / (n_x - 1);
            sup = std::max(sup, weight_mass(a, x, t) / d);
        }
    }
    return sup;
}

}  // namespace wavelab
