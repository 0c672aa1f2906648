#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wavelab {

enum class NonlinearityKind { AbsPow, SignedPow, Custom };

/// The nonlinearity F(u) of u_tt - u_xx = F(u) / (1+x^2)^{(1+a)/2}.
///
/// Built-ins are |u|^p and |u|^{p-1}u. A custom F must satisfy
/// F(0) = F'(0) = 0 and |F'(s)| <= p*A*|s|^{p-1}; the bound is spot-checked
/// on sampled points when the object is built, not proven.
class Nonlinearity {
public:
    using Fn = std::function<double(double)>;

    static Nonlinearity abs_pow(double p);
    static Nonlinearity signed_pow(double p);

    /// Throws std::invalid_argument if the spot check fails.
    static Nonlinearity custom(double p, double lipschitz_a, Fn value, Fn derivative,
                               std::string name = "custom");

    /// F == 0, the homogeneous problem (p only matters for the contract).
    static Nonlinearity zero(double p = 2.0);

    NonlinearityKind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    double lipschitz_a() const noexcept { return a_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double u) const noexcept {
        switch (kind_) {
        case NonlinearityKind::AbsPow:
            return magnitude(u);
        case NonlinearityKind::SignedPow:
            return u < 0.0 ? -magnitude(u) : magnitude(u);
        case NonlinearityKind::Custom:
            break;
        }
        return value_(u);
    }

    double derivative(double u) const;

private:
    Nonlinearity(NonlinearityKind kind, double p, double a, std::string name)
        : kind_(kind), p_(p), a_(a), name_(std::move(name)) {}

    double magnitude(double u) const noexcept {
        const double s = std::fabs(u);
        if (p_ == 2.0) return s * s;
        if (p_ == 3.0) return s * s * s;
        return std::pow(s, p_);
    }

    NonlinearityKind kind_;
    double p_;
    double a_;
    std::string name_;
    Fn value_;
    Fn derivative_;
};

/// Initial displacement f and velocity g, with the norms the theory uses.
struct InitialData {
    using Fn = std::function<double(double)>;

    std::string name;
    Fn f;
    Fn g;
    /// Optional closed-form primitive of g; free_solution prefers it over quadrature.
    Fn g_primitive;
    /// Radius R with supp f, supp g in [-R, R]; nullopt for unbounded data.
    std::optional<double> support_radius;
    bool f_is_zero = false;
    double sup_f = 0.0;  ///< ||f||_inf
    double l1_g = 0.0;   ///< ||g||_{L^1}
    double c0 = 0.0;     ///< (1/2) * integral of g over [-1, 1]

    /// Builds data from callables and fills the norms by sampling/quadrature.
    /// For unbounded data the norms are taken over [-cutoff, cutoff] plus the
    /// quadrature tails of |g| on the half lines.
    static InitialData from_functions(std::string name, Fn f, Fn g,
                                      std::optional<double> support_radius,
                                      bool f_is_zero = false, double cutoff = 50.0);
};

/// f = 0, g(y) = cos^2(pi y / 2) on |y| <= 1 and 0 outside. C^1, mass 1, c0 = 1/2.
InitialData builtin_blowup_data();

/// Looks up a named datum ("cos2-bump"). Throws std::invalid_argument otherwise.
InitialData named_data(const std::string& name);

/// Reads (y, f, g) rows from CSV and interpolates f and g with monotone
/// piecewise cubics; both vanish outside the sampled range. Throws IoError.
InitialData tabulated_data(const std::string& csv_path);

/// Same as tabulated_data but from in-memory samples (y strictly increasing).
InitialData tabulated_data(std::vector<double> y, std::vector<double> f, std::vector<double> g,
                           std::string name = "tabulated");

enum class Mode { Blowup, Existence };

struct ProblemSpec {
    double a = 0.0;    ///< weight exponent, >= -1
    double eps = 0.0;  ///< data amplitude
    Nonlinearity nonlinearity = Nonlinearity::abs_pow(2.0);
    InitialData data;
    Mode mode = Mode::Blowup;

    double p() const noexcept { return nonlinearity.p(); }
};

/// Every violated hypothesis, as human-readable strings. Empty means valid.
std::vector<std::string> validate_spec(const ProblemSpec& spec);

struct DataNorms {
    double M;   ///< sup|f| + ||g||_1
    double c0;  ///< (1/2) * integral_{-1}^{1} g
};

/// M from the stored norms, c0 recomputed by adaptive quadrature (rel. tol 1e-10).
/// Throws QuadratureError on non-convergence.
DataNorms data_norms(const InitialData& data);

/// phi(s) = s log(2 + s), s >= 0.
double phi(double s);

/// Inverse of phi on [0, inf): bracket by doubling, 60 bisections, Newton polish.
double phi_inverse(double y);

}  // namespace wavelab
