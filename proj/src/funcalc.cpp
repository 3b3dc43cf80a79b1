#include "pbam/funcalc.hpp"

#include <cmath>

#include "pbam/errors.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

SqrtDomain default_domain(AlgebraPtr algebra)
{
    SqrtDomain v;
    v.algebra = std::move(algebra);
    return v;
}

SqrtDomain lift_domain(const SqrtDomain& inner, AlgebraPtr path)
{
    const auto* p = as_path(*path);
    if (!p || p->inner()->id() != inner.algebra->id())
        throw Error("lift_domain: " + path->id() + " is not a path algebra over " + inner.algebra->id());
    SqrtDomain v = inner;
    v.algebra = std::move(path);
    return v;
}

bool in_domain(const Element& a, const SqrtDomain& v)
{
    if (a.algebra_id() != v.algebra->id())
        throw OwnerMismatch("in_domain: element of " + a.algebra_id() + ", domain over " + v.algebra->id());
    if ((a - a.adjoint()).top_seminorm() > v.self_adjoint_tol)
        return false;
    return a.seminorm(v.norm_level) < v.radius;
}

Element theta(const Element& a, const SqrtDomain& v)
{
    if (!in_domain(a, v))
        throw DomainViolation("theta: element outside V (|a|_" + std::to_string(v.norm_level) + " = " +
                              std::to_string(a.seminorm(v.norm_level)) + ", radius " +
                              std::to_string(v.radius) + ")");
    // expm1(-log1p(x)/2) keeps full relative accuracy near 0.
    return a.algebra().make(a.algebra().hermitian_calculus(
        a.payload(), [](double x) { return Complex(std::expm1(-0.5 * std::log1p(x)), 0.0); }));
}

double inverse_sqrt_coefficient(int k)
{
    double c = 1.0;
    for (int j = 1; j <= k; ++j)
        c *= (-0.5 - (j - 1)) / j;
    return c;
}

TaylorResult theta_taylor(const Element& a, int terms)
{
    const double r = a.top_seminorm();
    if (!(r < 1.0))
        throw DivergentSeries("theta_taylor: |a|_top = " + std::to_string(r) + " >= 1");
    Element sum = a.algebra().zero();
    Element power = a;
    double c = 1.0;
    for (int k = 1; k <= terms; ++k) {
        c *= (-0.5 - (k - 1)) / k;
        if (k > 1)
            power = power * a;
        sum = sum + c * power;
    }
    // Tail: |c_k| decreases, so after the explicit part the remaining terms
    // are bounded by a geometric series.
    double tail = 0.0;
    if (r > 0.0) {
        double ck = std::abs(inverse_sqrt_coefficient(terms));
        double rk = std::pow(r, terms);
        for (int k = terms + 1; k <= terms + 4000; ++k) {
            ck *= (k - 0.5) / k;
            rk *= r;
            tail += ck * rk;
            if (ck * rk < 1e-300)
                break;
        }
        tail += ck * rk * r / (1.0 - r);
    }
    return {sum, tail};
}

IsrpCheck verify_isrp(const Element& a, const SqrtDomain& v, double tol)
{
    IsrpCheck out;
    const Element th = theta(a, v);
    out.commute_defect = (quasi_product(a, th) - quasi_product(th, a)).top_seminorm();
    out.annihilate_defect = quasi_product(a, quasi_product(th, th)).top_seminorm();
    try {
        const Element inv = quasi_inverse(a);
        out.inverse_residual =
            std::max(quasi_product(a, inv).top_seminorm(), quasi_product(inv, a).top_seminorm());
        out.invertible = out.inverse_residual <= tol;
    } catch (const NotQuasiInvertible&) {
        out.invertible = false;
        out.inverse_residual = INFINITY;
    }
    out.zero_defect = theta(a.algebra().zero(), v).top_seminorm();
    out.commutes = out.commute_defect <= tol;
    out.annihilates = out.annihilate_defect <= tol;
    out.fixes_zero = out.zero_defect == 0.0;
    return out;
}

bool quasi_polar_defined(const Element& a, const SqrtDomain& v)
{
    const Element as = a.adjoint();
    return in_domain(quasi_product(as, a), v) && in_domain(quasi_product(a, as), v);
}

Element quasi_polar(const Element& a, const SqrtDomain& v)
{
    const Element as = a.adjoint();
    const Element left = quasi_product(as, a);
    if (!in_domain(left, v))
        throw DomainViolation("quasi_polar: a*.a outside V (|.|_" + std::to_string(v.norm_level) + " = " +
                              std::to_string(left.seminorm(v.norm_level)) + ")");
    if (!in_domain(quasi_product(a, as), v))
        throw DomainViolation("quasi_polar: a.a* outside V");
    return quasi_product(a, theta(left, v));
}

} // namespace pbam
