#pragma once

#include "pbam/algebra.hpp"
#include "pbam/element.hpp"

namespace pbam {

// The convex open set V = { a self-adjoint : |a|_{norm_level} < radius }.
struct SqrtDomain {
    AlgebraPtr algebra;
    int norm_level = 0;
    double radius = 0.5;
    double self_adjoint_tol = 1e-10;
};

/// Default V for an instance: radius 1/2 in the lowest seminorm (operator
/// norm for matrices, pointwise sup for circle functions and paths).
SqrtDomain default_domain(AlgebraPtr algebra);

/// The same V applied pointwise along a path algebra over V's algebra.
SqrtDomain lift_domain(const SqrtDomain& inner, AlgebraPtr path);

bool in_domain(const Element& a, const SqrtDomain& v);

/// theta(a) = (1+a)^{-1/2} - 1 through the spectral calculus.
Element theta(const Element& a, const SqrtDomain& v);

struct TaylorResult {
    Element value;
    double remainder_bound = 0.0;
};

/// Partial sum of sum_{k>=1} binom(-1/2, k) a^k with the tail bound
/// sum_{k>terms} |binom(-1/2,k)| r^k, r = |a|_top.
TaylorResult theta_taylor(const Element& a, int terms);

/// binom(-1/2, k)
double inverse_sqrt_coefficient(int k);

struct IsrpCheck {
    bool commutes = false;     // a.theta(a) = theta(a).a
    bool annihilates = false;  // a.(theta(a).theta(a)) = 0
    bool invertible = false;   // a has a computed .-inverse
    bool fixes_zero = false;   // theta(0) = 0
    double commute_defect = 0.0;
    double annihilate_defect = 0.0;
    double inverse_residual = 0.0;
    double zero_defect = 0.0;

    bool all() const { return commutes && annihilates && invertible && fixes_zero; }
};

IsrpCheck verify_isrp(const Element& a, const SqrtDomain& v, double tol = 1e-10);

/// u = a . theta(a* . a); requires a*.a and a.a* in V.
Element quasi_polar(const Element& a, const SqrtDomain& v);

/// True when both a*.a and a.a* lie in V.
bool quasi_polar_defined(const Element& a, const SqrtDomain& v);

} // namespace pbam
