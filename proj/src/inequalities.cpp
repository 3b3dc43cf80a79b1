#include <algorithm>
#include <complex>

#include "pbam/composition.hpp"
#include "pbam/errors.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

namespace {

void require_level(const Element& x, int n, int reach)
{
    if (n < 0 || n + reach >= x.algebra().levels())
        throw LevelOutOfRange("level " + std::to_string(n) + " needs level " + std::to_string(n + reach) +
                              " but the algebra exposes " + std::to_string(x.algebra().levels()));
}

} // namespace

double C2Margins::min() const { return std::min({star, scalar, add, mul}); }

C2Margins c2_margins(const Element& x, const Element& y, const Element& x2, const Element& y2, Complex lambda,
                         Complex mu, int n)
{
    require_level(x, n, 1);
    const auto k = n + 1;
    const Element dx = x - y;
    const Element dx2 = x2 - y2;
    C2Margins m;
    m.star = dx.seminorm(k) - (x.adjoint() - y.adjoint()).seminorm(n);
    m.scalar = std::abs(lambda - mu) * x.seminorm(n) + (std::abs(lambda) + std::abs(lambda - mu)) * dx.seminorm(n) -
               (lambda * x - mu * y).seminorm(n);
    m.add = dx.seminorm(n) + dx2.seminorm(n) - (x + x2 - y - y2).seminorm(n);
    m.mul = x.seminorm(k) * dx2.seminorm(k) + dx.seminorm(k) * (x2.seminorm(k) + dx2.seminorm(k)) -
            (x * x2 - y * y2).seminorm(n);
    return m;
}

C2Margins c2_margins(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a,
                         const Element& a2, const Element& b, const Element& b2, double s, double t, Complex lambda,
                         Complex mu, int n)
{
    return c2_margins(g(f(a, t), s), g(b, s), g(f(a2, t), s), g(b2, s), lambda, mu, n);
}

double product_shift_margin(const Element& y, const Element& b, const Element& q, int n)
{
    require_level(y, n, 1);
    const int k = n + 1;
    const Element d = y - q;
    const double rhs = d.seminorm(k) + b.seminorm(k) * (1.0 + q.seminorm(k) + d.seminorm(k));
    return rhs - (quasi_product(y, b) - q).seminorm(n);
}

} // namespace pbam
