#include <cmath>
#include <random>

#include "doctest.h"
#include "pbam/errors.hpp"
#include "pbam/funcalc.hpp"
#include "pbam/quasi.hpp"
#include "support.hpp"

using namespace pbam;
using namespace testing;

TEST_CASE("domain membership")
{
    const auto m1 = matrix_algebra(1);
    const auto m2 = matrix_algebra(2);
    const SqrtDomain v1 = default_domain(m1);
    CHECK(in_domain(m1->zero(), v1));
    CHECK(in_domain(scalar(m1, 0.49), v1));
    CHECK_FALSE(in_domain(scalar(m1, 0.51), v1));
    CHECK_FALSE(in_domain(scalar(m1, Complex(0.0, 0.1)), v1));
    CHECK_FALSE(in_domain(mat(m2, {{0.0, 1.0}, {0.0, 0.0}}), default_domain(m2)));
}

TEST_CASE("theta closed forms")
{
    const auto m1 = matrix_algebra(1);
    const auto m2 = matrix_algebra(2);
    CHECK(theta(m2->zero(), default_domain(m2)).same_payload(m2->zero()));
    CHECK(std::abs(value(theta(scalar(m1, 0.21), default_domain(m1))) - Complex(1.0 / 1.1 - 1.0)) < 1e-15);
    const Element d = mat(m2, {{0.21, 0.0}, {0.0, -0.19}});
    const Element expect = mat(m2, {{1.0 / 1.1 - 1.0, 0.0}, {0.0, 1.0 / 0.9 - 1.0}});
    CHECK((theta(d, default_domain(m2)) - expect).top_seminorm() < 1e-15);
    CHECK_THROWS_AS(theta(scalar(m1, 0.6), default_domain(m1)), DomainViolation);
}

TEST_CASE("theta on circle functions is pointwise")
{
    const auto s = smooth_circle_algebra(4);
    const auto* c = as_circle(*s);
    const Element f = c->from_function([](double th) { return Complex(0.3 * std::cos(th)); });
    const Element th = theta(f, default_domain(s));
    const Element expect =
        c->from_function([](double t) { return Complex(1.0 / std::sqrt(1.0 + 0.3 * std::cos(t)) - 1.0); });
    CHECK((th - expect).seminorm(0) < 1e-15);
}

TEST_CASE("taylor oracle")
{
    const auto m1 = matrix_algebra(1);
    const auto zero = theta_taylor(m1->zero(), 5);
    CHECK(zero.value.same_payload(m1->zero()));
    CHECK(zero.remainder_bound == 0.0);

    const auto r = theta_taylor(scalar(m1, 0.21), 30);
    CHECK(std::abs(value(r.value) - Complex(1.0 / 1.1 - 1.0)) <= r.remainder_bound + 1e-16);
    CHECK(r.remainder_bound < 1e-18);

    CHECK(inverse_sqrt_coefficient(0) == 1.0);
    CHECK(inverse_sqrt_coefficient(1) == -0.5);
    CHECK(inverse_sqrt_coefficient(2) == 0.375);

    const auto m4 = matrix_algebra(4);
    std::mt19937_64 rng(60);
    for (int k = 0; k < 50; ++k) {
        const Element a = random_hermitian(m4, rng, 0.4);
        const auto t = theta_taylor(a, 60);
        const double gap = (t.value - theta(a, default_domain(m4))).seminorm(0);
        CHECK(gap <= t.remainder_bound + 1e-12);
        CHECK(gap <= 1e-10);
    }
    CHECK_THROWS_AS(theta_taylor(scalar(m1, 1.0), 10), DivergentSeries);
}

TEST_CASE("isrp properties")
{
    const auto m1 = matrix_algebra(1);
    const auto z = verify_isrp(m1->zero(), default_domain(m1));
    CHECK(z.all());
    CHECK(z.commute_defect == 0.0);
    CHECK(z.annihilate_defect == 0.0);
    const auto s = verify_isrp(scalar(m1, 0.21), default_domain(m1));
    CHECK(s.all());
    CHECK(s.annihilate_defect < 1e-15);

    const auto m4 = matrix_algebra(4);
    std::mt19937_64 rng(500);
    for (int k = 0; k < 100; ++k) {
        const Element a = random_hermitian(m4, rng, 0.45 * (k + 1) / 101.0);
        const auto c = verify_isrp(a, default_domain(m4));
        CHECK(c.all());
        // (1+a)(1+theta)^2 = 1, checked directly.
        const Matrix one = Matrix::Identity(4, 4);
        const Matrix t = one + m(theta(a, default_domain(m4)));
        CHECK(op_norm((one + m(a)) * t * t - one) < 1e-12);
    }
}

TEST_CASE("quasi polar scalar oracle")
{
    const auto m1 = matrix_algebra(1);
    const SqrtDomain v = default_domain(m1);
    CHECK(quasi_polar(m1->zero(), v).same_payload(m1->zero()));
    CHECK(std::abs(value(quasi_polar(scalar(m1, 0.1), v))) < 1e-15);
    const Complex expect = Complex(1.0, 0.1) / std::sqrt(1.01) - 1.0;
    CHECK(std::abs(value(quasi_polar(scalar(m1, Complex(0.0, 0.1)), v)) - expect) < 1e-15);
    CHECK(std::abs(expect - Complex(-0.00496281, 0.09950372)) < 1e-8);
    CHECK(value(quasi_polar(scalar(m1, Complex(-1.0, 1.0)), v)) == Complex(-1.0, 1.0));
    CHECK_THROWS_AS(quasi_polar(scalar(m1, 1.0), v), DomainViolation);
    CHECK_FALSE(quasi_polar_defined(scalar(m1, 1.0), v));

    std::mt19937_64 rng(200);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int k = 0; k < 200; ++k) {
        const Complex a(u(rng), u(rng));
        const Complex got = 1.0 + value(quasi_polar(scalar(m1, a), v));
        CHECK(std::abs(got - (1.0 + a) / std::abs(1.0 + a)) < 1e-12);
    }
}

TEST_CASE("quasi polar gives quasi-unitaries")
{
    const auto m4 = matrix_algebra(4);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const Element a = m4->make(m4->random(rng, 0.1));
        if (!quasi_polar_defined(a, default_domain(m4)))
            continue;
        CHECK(is_quasi_unitary(quasi_polar(a, default_domain(m4)), 1e-9).ok);
    }
}

TEST_CASE("theta commutes with its argument and is Lipschitz")
{
    const auto m4 = matrix_algebra(4);
    const SqrtDomain v = default_domain(m4);
    std::mt19937_64 rng(11);
    const double lip = 0.5 * std::pow(0.6, -1.5);
    for (int k = 0; k < 50; ++k) {
        const Element a = random_hermitian(m4, rng, 0.4);
        const Element b = random_hermitian(m4, rng, 0.4);
        const Element ta = theta(a, v);
        CHECK((a * ta - ta * a).seminorm(0) <= 1e-11);
        CHECK((ta - theta(b, v)).seminorm(0) <= lip * (a - b).seminorm(0) + 1e-14);
    }
}

TEST_CASE("path domain is pointwise")
{
    const auto inner = matrix_algebra(1);
    const auto p = path_algebra(inner, 3);
    const SqrtDomain v = lift_domain(default_domain(inner), p);
    const auto* path = as_path(*p);
    const Element x = path->from_samples({scalar(inner, 0.1), scalar(inner, 0.2), scalar(inner, 0.3)});
    CHECK(in_domain(x, v));
    const Element t = theta(x, v);
    CHECK(std::abs(value(path->sample(t, 2)) - Complex(1.0 / std::sqrt(1.3) - 1.0)) < 1e-15);
    const Element y = path->from_samples({scalar(inner, 0.1), scalar(inner, 0.6), scalar(inner, 0.3)});
    CHECK_FALSE(in_domain(y, v));
}
