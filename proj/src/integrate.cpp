#include "wavelab/integrate.hpp"

#include "wavelab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wavelab {

namespace {

constexpr int kMaxDepth = 30;

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Piece {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

/// Single GK31 panel. Boost reports the Kronrod-Gauss difference on the
/// reference interval, so it is rescaled here.
Piece panel(const std::function<double(double)>& f, double a, double b) {
    Piece p;
    p.value = Rule::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    p.error *= 0.5 * (b - a);
    return p;
}

Piece adapt(const std::function<double(double)>& f, double a, double b, const Piece& whole,
            double rel_tol, double abs_tol, int depth) {
    if (whole.error <= std::max(rel_tol * whole.l1, abs_tol) || depth == 0 || !std::isfinite(whole.value)) {
        return whole;
    }
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) return whole;
    const Piece left = adapt(f, a, mid, panel(f, a, mid), rel_tol, 0.5 * abs_tol, depth - 1);
    const Piece right = adapt(f, mid, b, panel(f, mid, b), rel_tol, 0.5 * abs_tol, depth - 1);
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

Piece finite(const std::function<double(double)>& f, double a, double b, double rel_tol,
             double abs_tol) {
    return adapt(f, a, b, panel(f, a, b), rel_tol, abs_tol, kMaxDepth);
}

/// integral_{a}^{inf} f, via x = a + s/(1-s).
Piece upper_tail(const std::function<double(double)>& f, double a, double rel_tol, double abs_tol) {
    const std::function<double(double)> g = [&](double s) {
        if (s >= 1.0) return 0.0;
        const double inv = 1.0 / (1.0 - s);
        const double v = f(a + s * inv) * inv * inv;
        return std::isfinite(v) ? v : 0.0;
    };
    return finite(g, 0.0, 1.0, rel_tol, abs_tol);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                 std::vector<double> breakpoints, double abs_tol) {
    if (lo == hi) return 0.0;
    double sign = 1.0;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    std::erase_if(breakpoints, [&](double b) { return !(b > lo && b < hi) || !std::isfinite(b); });
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    const bool lo_inf = std::isinf(lo);
    const bool hi_inf = std::isinf(hi);
    if ((lo_inf || hi_inf) && breakpoints.empty()) {
        if (lo_inf && hi_inf) breakpoints.push_back(0.0);
        else breakpoints.push_back(lo_inf ? hi - 1.0 : lo + 1.0);
    }

    std::vector<double> nodes;
    nodes.reserve(breakpoints.size() + 2);
    nodes.push_back(lo);
    nodes.insert(nodes.end(), breakpoints.begin(), breakpoints.end());
    nodes.push_back(hi);

    const double width_finite = (lo_inf || hi_inf) ? 0.0 : hi - lo;
    Piece total;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const double a = nodes[k];
        const double b = nodes[k + 1];
        Piece p;
        if (std::isinf(a)) {
            const std::function<double(double)> mirrored = [&](double x) { return f(-x); };
            p = upper_tail(mirrored, -b, rel_tol, abs_tol);
        } else if (std::isinf(b)) {
            p = upper_tail(f, a, rel_tol, abs_tol);
        } else {
            const double share = width_finite > 0.0 ? abs_tol * (b - a) / width_finite : abs_tol;
            p = finite(f, a, b, rel_tol, share);
        }
        total.value += p.value;
        total.error += p.error;
        total.l1 += p.l1;
    }
    if (!std::isfinite(total.value) || total.error > std::max(rel_tol * total.l1, abs_tol)) {
        std::ostringstream msg;
        msg << "adaptive quadrature did not converge on [" << lo << ", " << hi << "]: estimate "
            << total.value << ", error " << total.error;
        throw QuadratureError(msg.str());
    }
    return sign * total.value;
}

}  // namespace wavelab
