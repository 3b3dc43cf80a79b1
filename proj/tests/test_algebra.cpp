#include <cmath>
#include <random>

#include "doctest.h"
#include "pbam/errors.hpp"
#include "pbam/quasi.hpp"
#include "pbam/serialize.hpp"
#include "support.hpp"

using namespace pbam;
using namespace testing;

TEST_CASE("quasi product examples")
{
    const auto m1 = matrix_algebra(1);
    const auto m2 = matrix_algebra(2);
    CHECK(quasi_product(m2->zero(), m2->zero()).same_payload(m2->zero()));
    CHECK(value(quasi_product(scalar(m1, 1.0), scalar(m1, 2.0))) == Complex(5.0));
    const Element a = mat(m2, {{0.0, 1.0}, {0.0, 0.0}});
    const Element b = mat(m2, {{0.0, 0.0}, {1.0, 0.0}});
    CHECK(quasi_product(a, b).same_payload(mat(m2, {{1.0, 1.0}, {1.0, 0.0}})));
}

TEST_CASE("owner mismatch is rejected")
{
    const auto a = matrix_algebra(2, 6, "A");
    const auto b = matrix_algebra(2, 6, "B");
    CHECK_THROWS_AS(quasi_product(a->zero(), b->zero()), OwnerMismatch);
    CHECK_THROWS_AS(canonical_distance(a->zero(), b->zero()), OwnerMismatch);
}

TEST_CASE("quasi inverse examples")
{
    const auto m1 = matrix_algebra(1);
    const auto m2 = matrix_algebra(2);
    CHECK(quasi_inverse(m2->zero()).same_payload(m2->zero()));
    CHECK(std::abs(value(quasi_inverse(scalar(m1, 1.0))) - Complex(-0.5)) < 1e-15);
    const Element n = mat(m2, {{0.0, 1.0}, {0.0, 0.0}});
    CHECK((quasi_inverse(n) - mat(m2, {{0.0, -1.0}, {0.0, 0.0}})).top_seminorm() < 1e-15);
    CHECK_THROWS_AS(quasi_inverse(scalar(m1, -1.0)), NotQuasiInvertible);

    const auto s = smooth_circle_algebra(4);
    CHECK_THROWS_AS(quasi_inverse(as_circle(*s)->from_function([](double) { return Complex(-1.0); })), NotQuasiInvertible);
}

TEST_CASE("quasi inverse agrees with the Neumann series")
{
    const auto a3 = matrix_algebra(3);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Element a = a3->make(a3->random(rng, 1.0));
        a = (0.5 / a.seminorm(0)) * a;
        // (1+a)^{-1} - 1 = sum_{k>=1} (-a)^k
        Matrix sum = Matrix::Zero(3, 3), term = Matrix::Identity(3, 3);
        for (int k = 1; k < 80; ++k) {
            term = (-m(a) * term).eval();
            sum += term;
        }
        CHECK(op_norm(m(quasi_inverse(a)) - sum) < 1e-12);
    }
}

TEST_CASE("quasi unitary examples")
{
    const auto m1 = matrix_algebra(1);
    const auto zero = is_quasi_unitary(m1->zero(), 1e-12);
    CHECK(zero.ok);
    CHECK(zero.defect == 0.0);
    CHECK(is_quasi_unitary(scalar(m1, -2.0), 1e-12).ok);
    const auto one = is_quasi_unitary(scalar(m1, 1.0), 1e-12);
    CHECK_FALSE(one.ok);
    CHECK(one.defect == doctest::Approx(3.0));
}

TEST_CASE("useful45 margins")
{
    const auto a3 = matrix_algebra(3);
    CHECK(check_useful45(a3->zero(), a3->zero(), 0) == 0.0);
    std::mt19937_64 rng(45);
    const Element b = a3->make(a3->random(rng, 1.0));
    CHECK(check_useful45(b, b, 1) >= 0.0);
    for (int k = 0; k < 1000; ++k) {
        const Element x = a3->make(a3->random(rng, 1.0));
        const Element y = (k % 2) ? a3->make(a3->random(rng, 1.0)) : x + a3->make(a3->random(rng, 1e-3));
        CHECK(check_useful45(x, y, k % 4) >= -1e-12);
    }
    CHECK_THROWS_AS(check_useful45(b, b, 4), LevelOutOfRange);
}

TEST_CASE("canonical distance")
{
    const auto m1 = matrix_algebra(1, 6);
    CHECK(canonical_distance(scalar(m1, 1.0), scalar(m1, 1.0)) == 0.0);
    double series = 0.0;
    for (int n = 0; n < 6; ++n)
        series += std::ldexp(1.0, -n);
    CHECK(canonical_distance(m1->zero(), scalar(m1, 3.0)) == doctest::Approx(series).epsilon(1e-15));
    const auto a4 = matrix_algebra(4);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        const Element a = a4->make(a4->random(rng, 0.3));
        const Element b = a4->make(a4->random(rng, 0.3));
        const Element c = a4->make(a4->random(rng, 1.0));
        CHECK(canonical_distance(a, b) == doctest::Approx(canonical_distance(a + c, b + c)).epsilon(1e-12));
        CHECK(canonical_distance(a, b) == doctest::Approx(canonical_distance(b, a)).epsilon(1e-15));
    }
}

TEST_CASE("point at distance lands just inside the target")
{
    const auto a3 = matrix_algebra(3);
    std::mt19937_64 rng(2);
    const Element x = a3->make(a3->random(rng, 1.0));
    const Element dir = a3->make(a3->random(rng, 1.0));
    for (double target : {0.01, 0.2, 0.9}) {
        const double d = canonical_distance(x, point_at_distance(x, dir, target));
        CHECK(d < target);
        CHECK(d > 0.999 * target);
    }
}

TEST_CASE("monoid and group laws")
{
    const auto a4 = matrix_algebra(4);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 50; ++k) {
        const Element a = a4->make(a4->random(rng, 0.5));
        const Element b = a4->make(a4->random(rng, 0.5));
        const Element c = a4->make(a4->random(rng, 0.5));
        const Element lhs = quasi_product(quasi_product(a, b), c);
        const Element rhs = quasi_product(a, quasi_product(b, c));
        CHECK((lhs - rhs).seminorm(0) <= 1e-12 * (1.0 + lhs.seminorm(0)));
        CHECK(quasi_product(a, a4->zero()).same_payload(a));
        CHECK(quasi_product(a4->zero(), a).same_payload(a));
        const Element inv_ab = quasi_inverse(quasi_product(a, b));
        const Element prod = quasi_product(quasi_inverse(b), quasi_inverse(a));
        CHECK((inv_ab - prod).seminorm(0) <= 1e-10);
        CHECK((quasi_product(a, b).adjoint() - quasi_product(b.adjoint(), a.adjoint())).seminorm(0) <= 1e-14);
        // (1+a)(1+b) = 1 + a.b in the unitization.
        const Matrix one = Matrix::Identity(4, 4);
        CHECK(op_norm((one + m(a)) * (one + m(b)) - (one + m(quasi_product(a, b)))) <= 1e-14);
    }
}

TEST_CASE("matrix seminorm is the operator norm")
{
    const auto a3 = matrix_algebra(3, 5);
    CHECK(a3->levels() == 5);
    const Element d = mat(a3, {{3.0, 0.0, 0.0}, {0.0, -4.0, 0.0}, {0.0, 0.0, 1.0}});
    for (int n = 0; n < 5; ++n)
        CHECK(d.seminorm(n) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(d.seminorm(5), LevelOutOfRange);
    CHECK_THROWS(matrix_algebra(3, 3));
}

TEST_CASE("circle seminorms of Fourier modes")
{
    const auto s = smooth_circle_algebra(6, 6);
    for (int k : {0, 1, -2, 5}) {
        const Element e = as_circle(*s)->mode(k);
        double expect = 0.0, fact = 1.0;
        for (int n = 0; n < 6; ++n) {
            if (n > 0)
                fact *= n;
            expect += std::pow(std::abs(k), n) / fact;
            CHECK(e.seminorm(n) == doctest::Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("circle Fourier round trip and pointwise structure")
{
    const auto s = smooth_circle_algebra(4);
    const auto* c = as_circle(*s);
    std::vector<Complex> coeffs = {{0.1, 0.2}, {0.0, -1.0}, {2.0, 0.0}, {0.5, 0.5}, {-0.3, 0.0}};
    const Element f = c->from_fourier(coeffs, 2);
    const auto back = c->fourier(f, 2);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        CHECK(std::abs(back[i] - coeffs[i]) < 1e-14);
    const Element prod = c->mode(1) * c->mode(-1);
    CHECK((prod - c->mode(0)).top_seminorm() < 1e-12);
    CHECK((c->mode(3).adjoint() - c->mode(-3)).top_seminorm() < 1e-11);
}

TEST_CASE("seminorm contracts on random samples")
{
    for (const auto& alg : {matrix_algebra(3), smooth_circle_algebra(5), path_algebra(matrix_algebra(2), 5)}) {
        std::mt19937_64 rng(4);
        for (int k = 0; k < 100; ++k) {
            const Element a = alg->make(alg->random(rng, 1.0));
            const Element b = alg->make(alg->random(rng, 1.0));
            const auto na = alg->seminorms(a.payload());
            const auto nb = alg->seminorms(b.payload());
            const auto nas = alg->seminorms(a.adjoint().payload());
            const auto nab = alg->seminorms((a * b).payload());
            const auto nsum = alg->seminorms((a + b).payload());
            const auto nl = alg->seminorms((Complex(0.3, -2.0) * a).payload());
            for (std::size_t n = 0; n + 1 < na.size(); ++n) {
                CHECK(na[n] <= na[n + 1] * (1 + 1e-12));
                CHECK(nas[n] <= na[n + 1] * (1 + 1e-12));
                CHECK(nab[n] <= na[n + 1] * nb[n + 1] * (1 + 1e-12));
            }
            for (std::size_t n = 0; n < na.size(); ++n) {
                CHECK(nsum[n] <= (na[n] + nb[n]) * (1 + 1e-12));
                CHECK(nl[n] == doctest::Approx(std::abs(Complex(0.3, -2.0)) * na[n]).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("path algebra samples")
{
    const auto inner = matrix_algebra(2);
    const auto p = path_algebra(inner, 5);
    const auto* path = as_path(*p);
    CHECK(path->p_value(0) == 0.0);
    CHECK(path->p_value(4) == 1.0);
    std::vector<Element> samples;
    for (int i = 0; i < 5; ++i)
        samples.push_back(mat(inner, {{double(i), 0.0}, {0.0, 0.0}}));
    const Element x = path->from_samples(samples);
    CHECK(x.seminorm(0) == doctest::Approx(4.0));
    CHECK(path->sample(x, 3).same_payload(samples[3]));
}

TEST_CASE("random quasi-unitaries")
{
    std::mt19937_64 rng(8);
    for (const auto& alg : {matrix_algebra(4), smooth_circle_algebra(4), path_algebra(matrix_algebra(3), 4)})
        for (int k = 0; k < 5; ++k)
            CHECK(is_quasi_unitary(alg->make(alg->random_quasi_unitary(rng)), 1e-12).ok);
}

TEST_CASE("element JSON round trip")
{
    const auto a = matrix_algebra(2, 6, "M2");
    const auto s = smooth_circle_algebra(2, 6, "S2");
    std::map<std::string, AlgebraPtr> reg = {{"M2", a}, {"S2", s}};
    std::mt19937_64 rng(1);
    for (const auto& alg : {a, s}) {
        const Element x = alg->make(alg->random(rng, 1.0));
        const Json j = element_to_json(x);
        CHECK(j.at("algebra") == alg->id());
        CHECK(element_from_json(Json::parse(j.dump()), reg).same_payload(x));
    }
    CHECK_THROWS_AS(element_from_json(Json{{"algebra", "nope"}, {"payload", Json::array()}}, reg), ConfigError);
}
