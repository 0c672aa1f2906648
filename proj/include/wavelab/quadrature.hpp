#pragma once

#include "wavelab/lattice.hpp"
#include "wavelab/problem.hpp"

namespace wavelab {

/// Backward light cone D(x,t) = {(y,s) : 0 <= s <= t, |y - x| <= t - s}.
struct ConeTriangle {
    double apex_x = 0.0;
    double apex_t = 0.0;

    double area() const noexcept { return apex_t * apex_t; }
    bool contains(double y, double s) const noexcept {
        return s >= 0.0 && s <= apex_t && std::fabs(y - apex_x) <= apex_t - s;
    }
};

/// d'Alembert solution of the homogeneous problem with data (f, g), no eps:
/// (f(x+t) + f(x-t))/2 + (1/2) * integral_{x-t}^{x+t} g.
/// Uses data.g_primitive when present, adaptive quadrature (1e-10) otherwise.
double free_solution(const InitialData& data, double x, double t);

/// (1 + x^2)^{-(1+a)/2}
inline double weight(double a, double x) {
    if (a == -1.0) return 1.0;
    if (a == 1.0) return 1.0 / (1.0 + x * x);
    return std::pow(1.0 + x * x, -0.5 * (1.0 + a));
}

/// H(x, u) = F(u) * (1 + x^2)^{-(1+a)/2}
double weight_source(const ProblemSpec& spec, double x, double u);

/// (1/2) * iint_D V(y,s) (1+y^2)^{-(1+a)/2} dy ds on the marching lattice.
///
/// The cone is tiled exactly by lattice diamonds |y-y_c| + |s-s_c| <= h
/// (midpoint rule, area 2h^2) and one row of base triangles with vertices
/// (y-h,0), (y+h,0), (y,h) (vertex rule, area h^2). The apex must be a lattice
/// node; throws GeometryError when it is not, or when the lattice does not
/// cover the cone.
double duhamel_apply(double a, const GridFunction& V, const ConeTriangle& cone);

/// Same as duhamel_apply with the weight exponent taken from spec.
double duhamel_apply(const ProblemSpec& spec, const GridFunction& V, const ConeTriangle& cone);

/// duhamel_apply at every node at once, via the parallelogram recurrence
/// W(x,t+h) = W(x+h,t) + W(x-h,t) - W(x,t-h) + h^2 V w(x,t).
/// Values outside the lattice count as zero, so nodes whose cone leaves the
/// lattice see V truncated to it.
GridFunction duhamel_field(double a, const GridFunction& V);

/// I(x,t) = iint_{D(x,t)} (1+|y|)^{-(1+a)} dy ds. Closed-form y-primitive,
/// adaptive quadrature in s.
double weight_mass(double a, double x, double t);

/// D(tau): (1+tau)^{1-a} for a < 0, phi(tau) for a = 0, 1+tau for a > 0.
double damping_profile(double a, double tau);

/// sup of I(x,t) / D(T) over a (n_x by n_t) grid with 0 <= t <= T and
/// |x| <= 2T + 2 (both grids contain 0 and t = T). Empirical, not a proof.
double mass_bound_constant(double a, double sample_T, int n_x = 41, int n_t = 41);

}  // namespace wavelab
