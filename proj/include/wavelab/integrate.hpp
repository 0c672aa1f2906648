#pragma once

#include <functional>
#include <vector>

namespace wavelab {

/// Adaptive Gauss-Kronrod (7-15 point pairs of the 31-point rule) integration
/// of f over [lo, hi], split at the given interior breakpoints (kinks of the
/// integrand). Infinite limits are mapped to [0, 1). Throws QuadratureError
/// when the error estimate exceeds max(rel_tol * L1, abs_tol), L1 being the
/// integral of |f|, or when the result is not finite.
double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                 std::vector<double> breakpoints = {}, double abs_tol = 0.0);

}  // namespace wavelab
