#pragma once

#include "pbam/algebra.hpp"
#include "pbam/element.hpp"

namespace pbam {

struct Tolerances {
    double exact = 1e-12;   // identity-type checks, relative
    double derived = 1e-9;  // derived quantities
};

/// a . b = a + b + ab, which is (1+a)(1+b) = 1 + a.b in the unitization.
Element quasi_product(const Element& a, const Element& b);

/// The two-sided .-inverse, (1+a)^{-1} - 1.
Element quasi_inverse(const Element& a);

struct QuasiUnitaryCheck {
    bool ok = false;
    double defect = 0.0; // max over levels of max(|u*.u|_n, |u.u*|_n)
};

QuasiUnitaryCheck is_quasi_unitary(const Element& u, double tol);

/// RHS - LHS of |b*.b - c*.c|_n <= 2|b-c|_{n+2}(1 + |b|_{n+2} + |b-c|_{n+2}).
double check_useful45(const Element& b, const Element& c, int n);

/// d(a,b) = sum_n 2^{-n} min(1, |a-b|_n) over the exposed levels.
double canonical_distance(const Element& a, const Element& b);

/// Element at the given canonical distance from `x` along `direction`
/// (bisection on the scale; the distance is monotone in it). Targets at or
/// beyond the metric's supremum are clamped.
Element point_at_distance(const Element& x, const Element& direction, double target);

} // namespace pbam
