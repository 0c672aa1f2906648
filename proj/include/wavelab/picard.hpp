#pragma once

#include "wavelab/lattice.hpp"
#include "wavelab/problem.hpp"

#include <optional>
#include <vector>

namespace wavelab {

/// Proof-of-existence record for one Picard solve.
struct ExistenceCertificate {
    double T_star = 0.0;             ///< certified horizon for C_a_used
    double contraction_ratio = 0.0;  ///< largest measured d_{n+1}/d_n
    double C_a_used = 0.0;
    double M = 0.0;
    double eps = 0.0;
    int iterations = 0;
    double residual = 0.0;
    /// C_a comes from sampling, so the certificate is empirical.
    bool empirical_constant = true;
};

struct HorizonResult {
    double T = 0.0;
    /// false when the existence condition already fails at T = 0.
    bool certified = false;
};

/// Lattice on which both solvers run: |x| <= R + T (plus two cells), rows up
/// to T. For unbounded data R is the cutoff.
GridFunction solution_lattice(const ProblemSpec& spec, double h, double T, double cutoff = 20.0);

/// eps * u^0 sampled at every node of `lattice`.
GridFunction sample_free_grid(const ProblemSpec& spec, const GridFunction& lattice);

/// u0_grid + L(H(., u_prev)). Throws GeometryError on mismatched lattices.
GridFunction picard_step(const ProblemSpec& spec, const GridFunction& u_prev,
                         const GridFunction& u0_grid);

/// Largest T with 2^{p+1} p C_a D(T) M^{p-1} eps^{p-1} <= 1.
HorizonResult certified_horizon(const ProblemSpec& spec, double C_a);

/// Constant the certificate uses at horizon T:
/// 2 * mass_bound_constant(a, T) * max(1, 2^{(a-1)/2}).
/// The last factor converts the (1+|y|) weight of I(x,t) back to
/// (1+y^2)^{1/2} together with the 1/2 in front of L.
double certificate_constant(double a, double T);

/// Largest T whose own certificate constant still certifies it,
/// i.e. certified_horizon(spec, certificate_constant(a, T)).T >= T.
HorizonResult self_consistent_horizon(const ProblemSpec& spec);

struct PicardResult {
    GridFunction u;
    std::optional<ExistenceCertificate> certificate;
    std::vector<double> differences;  ///< d_n = sup|u_{n+1} - u_n|
    std::vector<double> ratios;       ///< d_n / d_{n-1}
    std::vector<double> iterate_norms;
    double residual = 0.0;  ///< sup|u - u0 - L(H(u))| plus truncation tail
    double truncation_tail = 0.0;
    double horizon = 0.0;
    int iterations = 0;
};

inline constexpr int kPicardMaxIterations = 60;
inline constexpr double kContractionSlack = 0.1;

/// Picard iteration u_{n+1} = u_0 + L(H(u_n)) from u_1 = eps u^0 until
/// successive iterates differ by <= tol (default 1e-8 M eps).
/// Throws IterationDiverged (sup > 4 M eps) or IterationStagnated (60 steps).
/// The certificate is issued only if T is within the certified horizon and
/// every measured ratio is <= 0.5 (1 + slack).
PicardResult picard_solve(const ProblemSpec& spec, double h, double T,
                          std::optional<double> tol = std::nullopt);

}  // namespace wavelab
