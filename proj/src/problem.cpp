#include "wavelab/problem.hpp"

#include "wavelab/errors.hpp"
#include "wavelab/integrate.hpp"

// Boost 1.74 pchip calls isnan unqualified.
#include <cmath>
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wavelab {

namespace {

constexpr int kSpotCheckPoints = 1000;
constexpr int kDataSamples = 4001;
constexpr double kNormTolerance = 1e-10;

std::vector<double> spot_check_points() {
    // Geometric magnitudes in [1e-3, 1e3], both signs.
    std::vector<double> pts;
    pts.reserve(kSpotCheckPoints);
    const int half = kSpotCheckPoints / 2;
    for (int k = 0; k < half; ++k) {
        const double s = std::pow(10.0, -3.0 + 6.0 * k / (half - 1));
        pts.push_back(s);
        pts.push_back(-s);
    }
    return pts;
}

std::pair<double, double> sample_range(const InitialData& data, double cutoff = 50.0) {
    const double r = data.support_radius.value_or(cutoff);
    return {-r, r};
}

std::vector<double> data_kinks(const InitialData& data) {
    std::vector<double> kinks;
    if (data.support_radius) {
        kinks.push_back(-*data.support_radius);
        kinks.push_back(*data.support_radius);
    }
    return kinks;
}

}  // namespace

Nonlinearity Nonlinearity::abs_pow(double p) {
    return Nonlinearity(NonlinearityKind::AbsPow, p, 1.0, "abs-pow");
}

Nonlinearity Nonlinearity::signed_pow(double p) {
    return Nonlinearity(NonlinearityKind::SignedPow, p, 1.0, "signed-pow");
}

Nonlinearity Nonlinearity::custom(double p, double lipschitz_a, Fn value, Fn derivative,
                                  std::string name) {
    if (!value || !derivative) throw std::invalid_argument("custom nonlinearity needs F and F'");
    if (!(lipschitz_a >= 0.0)) throw std::invalid_argument("Lipschitz constant A must be >= 0");
    if (std::fabs(value(0.0)) > 1e-12) throw std::invalid_argument("custom F must satisfy F(0) = 0");
    if (std::fabs(derivative(0.0)) > 1e-12) {
        throw std::invalid_argument("custom F must satisfy F'(0) = 0");
    }
    for (double s : spot_check_points()) {
        const double bound = p * lipschitz_a * std::pow(std::fabs(s), p - 1.0);
        const double d = derivative(s);
        if (!std::isfinite(d) || std::fabs(d) > bound * (1.0 + 1e-9) + 1e-12) {
            std::ostringstream msg;
            msg << "custom F violates |F'(s)| <= p A |s|^(p-1) at s = " << s;
            throw std::invalid_argument(msg.str());
        }
    }
    Nonlinearity out(NonlinearityKind::Custom, p, lipschitz_a, std::move(name));
    out.value_ = std::move(value);
    out.derivative_ = std::move(derivative);
    return out;
}

Nonlinearity Nonlinearity::zero(double p) {
    auto z = [](double) { return 0.0; };
    return custom(p, 0.0, z, z, "zero");
}

double Nonlinearity::derivative(double u) const {
    switch (kind_) {
    case NonlinearityKind::AbsPow: {
        const double m = p_ * std::pow(std::fabs(u), p_ - 1.0);
        return u < 0.0 ? -m : m;
    }
    case NonlinearityKind::SignedPow:
        return p_ * std::pow(std::fabs(u), p_ - 1.0);
    case NonlinearityKind::Custom:
        break;
    }
    return derivative_(u);
}

InitialData InitialData::from_functions(std::string name, Fn f, Fn g,
                                        std::optional<double> support_radius, bool f_is_zero,
                                        double cutoff) {
    InitialData data;
    data.name = std::move(name);
    data.f = std::move(f);
    data.g = std::move(g);
    data.support_radius = support_radius;
    data.f_is_zero = f_is_zero;

    const auto [lo, hi] = sample_range(data, cutoff);
    if (!f_is_zero) {
        double sup = 0.0;
        for (int k = 0; k < kDataSamples; ++k) {
            const double y = lo + (hi - lo) * k / (kDataSamples - 1);
            sup = std::max(sup, std::fabs(data.f(y)));
        }
        data.sup_f = sup;
    }
    const auto abs_g = [&](double y) { return std::fabs(data.g(y)); };
    if (support_radius) {
        data.l1_g = integrate(abs_g, lo, hi, kNormTolerance, {-1.0, 0.0, 1.0});
    } else {
        data.l1_g = integrate(abs_g, -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity(), kNormTolerance);
    }
    data.c0 = data_norms(data).c0;
    return data;
}

InitialData builtin_blowup_data() {
    using std::numbers::pi;
    InitialData data;
    data.name = "cos2-bump";
    data.f = [](double) { return 0.0; };
    data.g = [](double y) {
        if (std::fabs(y) > 1.0) return 0.0;
        const double c = std::cos(0.5 * pi * y);
        return c * c;
    };
    data.g_primitive = [](double y) {
        if (y >= 1.0) return 0.5;
        if (y <= -1.0) return -0.5;
        return 0.5 * y + std::sin(pi * y) / (2.0 * pi);
    };
    data.support_radius = 1.0;
    data.f_is_zero = true;
    data.sup_f = 0.0;
    data.l1_g = 1.0;
    data.c0 = 0.5;
    return data;
}

InitialData named_data(const std::string& name) {
    if (name == "cos2-bump") return builtin_blowup_data();
    throw std::invalid_argument("unknown initial data '" + name + "' (known: cos2-bump)");
}

InitialData tabulated_data(std::vector<double> y, std::vector<double> f, std::vector<double> g,
                           std::string name) {
    if (y.size() != f.size() || y.size() != g.size()) {
        throw std::invalid_argument("tabulated data: column lengths differ");
    }
    if (y.size() < 4) throw std::invalid_argument("tabulated data needs at least 4 samples");
    if (!std::is_sorted(y.begin(), y.end()) ||
        std::adjacent_find(y.begin(), y.end()) != y.end()) {
        throw std::invalid_argument("tabulated data: y must be strictly increasing");
    }
    const double y_lo = y.front();
    const double y_hi = y.back();
    const bool f_zero = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
    double sup_f = 0.0;
    for (double v : f) sup_f = std::max(sup_f, std::fabs(v));

    using Spline = boost::math::interpolators::pchip<std::vector<double>>;
    auto fs = std::make_shared<Spline>(std::vector<double>(y), std::move(f));
    auto gs = std::make_shared<Spline>(std::vector<double>(y), std::move(g));

    InitialData data;
    data.name = std::move(name);
    data.f = [fs, y_lo, y_hi](double x) { return (x < y_lo || x > y_hi) ? 0.0 : (*fs)(x); };
    data.g = [gs, y_lo, y_hi](double x) { return (x < y_lo || x > y_hi) ? 0.0 : (*gs)(x); };
    data.support_radius = std::max(std::fabs(y_lo), std::fabs(y_hi));
    data.f_is_zero = f_zero;
    // pchip never overshoots the samples, so the sample max is the sup.
    data.sup_f = sup_f;
    const auto abs_g = [&](double x) { return std::fabs(data.g(x)); };
    data.l1_g = integrate(abs_g, y_lo, y_hi, kNormTolerance, y);
    data.c0 = data_norms(data).c0;
    return data;
}

InitialData tabulated_data(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open initial data file '" + csv_path + "'");
    std::vector<double> y, f, g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double yy, ff, gg;
        if (!(fields >> yy >> ff >> gg)) {
            if (y.empty()) continue;  // header
            throw IoError(csv_path + ":" + std::to_string(line_no) + ": expected y, f, g");
        }
        y.push_back(yy);
        f.push_back(ff);
        g.push_back(gg);
    }
    return tabulated_data(std::move(y), std::move(f), std::move(g), csv_path);
}

std::vector<std::string> validate_spec(const ProblemSpec& spec) {
    std::vector<std::string> violations;
    const double p = spec.p();
    if (!(p > 1.0)) violations.emplace_back("p must exceed 1");
    if (!(spec.a >= -1.0)) violations.emplace_back("a must be at least -1");
    if (!(spec.eps > 0.0) || !std::isfinite(spec.eps)) violations.emplace_back("eps must be positive");

    const InitialData& d = spec.data;
    if (!d.f || !d.g) {
        violations.emplace_back("initial data must define f and g");
        return violations;
    }
    if (!std::isfinite(d.sup_f) || !std::isfinite(d.l1_g)) {
        violations.emplace_back("data norms must be finite");
    }
    if (spec.mode == Mode::Blowup) {
        const auto [lo, hi] = sample_range(d);
        bool f_zero = true;
        bool g_nonneg = true;
        for (int k = 0; k < kDataSamples; ++k) {
            const double y = lo + (hi - lo) * k / (kDataSamples - 1);
            if (d.f(y) != 0.0) f_zero = false;
            if (d.g(y) < 0.0) g_nonneg = false;
        }
        if (!f_zero) violations.emplace_back("f must vanish identically");
        if (!g_nonneg) violations.emplace_back("g must be nonnegative");
        if (!(d.c0 > 0.0)) violations.emplace_back("c0 must be positive");
    }
    return violations;
}

DataNorms data_norms(const InitialData& data) {
    std::vector<double> kinks = data_kinks(data);
    kinks.push_back(0.0);
    const double integral = integrate(data.g, -1.0, 1.0, kNormTolerance, kinks);
    return {data.sup_f + data.l1_g, 0.5 * integral};
}

double phi(double s) {
    if (!(s >= 0.0)) throw DomainError("phi: argument must be >= 0");
    return s * std::log(2.0 + s);
}

double phi_inverse(double y) {
    if (!(y >= 0.0)) throw DomainError("phi_inverse: argument must be >= 0");
    if (y == 0.0) return 0.0;
    double lo = 0.0;
    double hi = std::max(1.0, y);
    while (phi(hi) < y) hi *= 2.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < y ? lo : hi) = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int k = 0; k < 5; ++k) {
        const double r = phi(s) - y;
        if (std::fabs(r) <= 1e-12 * std::max(1.0, y)) break;
        const double slope = std::log(2.0 + s) + s / (2.0 + s);
        s = std::max(0.0, s - r / slope);
    }
    return s;
}

}  // namespace wavelab
