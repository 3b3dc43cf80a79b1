#include "pbam/quasi.hpp"

#include <algorithm>
#include <cmath>

#include "pbam/errors.hpp"

namespace pbam {

Element quasi_product(const Element& a, const Element& b)
{
    require_same_owner(a, b, "quasi_product");
    return a + b + a * b;
}

Element quasi_inverse(const Element& a)
{
    return a.algebra().make(a.algebra().quasi_inverse(a.payload()));
}

QuasiUnitaryCheck is_quasi_unitary(const Element& u, double tol)
{
    const Element us = u.adjoint();
    const auto left = u.algebra().seminorms(quasi_product(us, u).payload());
    const auto right = u.algebra().seminorms(quasi_product(u, us).payload());
    double defect = 0.0;
    for (std::size_t n = 0; n < left.size(); ++n)
        defect = std::max({defect, left[n], right[n]});
    return {defect <= tol, defect};
}

double check_useful45(const Element& b, const Element& c, int n)
{
    require_same_owner(b, c, "check_useful45");
    const Algebra& alg = b.algebra();
    if (n < 0 || n > alg.levels() - 3)
        throw LevelOutOfRange("useful45 needs level n+2 <= " + std::to_string(alg.top_level()) +
                              ", got n = " + std::to_string(n));
    const Element diff = b - c;
    const double lhs = (quasi_product(b.adjoint(), b) - quasi_product(c.adjoint(), c)).seminorm(n);
    const double d2 = diff.seminorm(n + 2);
    const double rhs = 2.0 * d2 * (1.0 + b.seminorm(n + 2) + d2);
    return rhs - lhs;
}

double canonical_distance(const Element& a, const Element& b)
{
    require_same_owner(a, b, "canonical_distance");
    const auto norms = a.algebra().seminorms((a - b).payload());
    double d = 0.0;
    double weight = 1.0;
    for (double v : norms) {
        d += weight * std::min(1.0, v);
        weight *= 0.5;
    }
    return d;
}

Element point_at_distance(const Element& x, const Element& direction, double target)
{
    require_same_owner(x, direction, "point_at_distance");
    if (target <= 0.0)
        return x;
    const Element zero = x.algebra().zero();
    auto dist = [&](double s) { return canonical_distance(zero, s * direction); };
    double hi = 1.0;
    int guard = 0;
    while (dist(hi) < target && guard++ < 200)
        hi *= 2.0;
    if (dist(hi) < target)
        return x + hi * direction;
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dist(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return x + lo * direction;
}

} // namespace pbam
