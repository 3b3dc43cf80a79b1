#include <cmath>
#include <random>

#include "doctest.h"
#include "pbam/defects.hpp"
#include "pbam/errors.hpp"
#include "support.hpp"

using namespace pbam;
using namespace testing;

TEST_CASE("exact hom has zero defects")
{
    const auto a3 = matrix_algebra(3);
    const auto f = exact_hom(a3);
    std::mt19937_64 rng(1);
    const Element a = a3->make(a3->random(rng, 1.0));
    const Element b = a3->make(a3->random(rng, 1.0));
    for (double t : {0.0, 1.5, 7.0})
        for (int n = 0; n < 4; ++n) {
            CHECK(defect_star(*f, a, t, n) == 0.0);
            CHECK(defect_scalar(*f, a, Complex(0.7, -0.3), t, n) == 0.0);
            CHECK(defect_add(*f, a, b, t, n) == 0.0);
            CHECK(defect_mul(*f, a, b, t, n) == 0.0);
        }
    CHECK_THROWS_AS((*f)(a, -1.0), Error);
    CHECK_THROWS_AS((*f)(matrix_algebra(3, 6, "other")->zero(), 1.0), OwnerMismatch);
}

TEST_CASE("perturbed hom defects match the expansion")
{
    const auto a3 = matrix_algebra(3);
    const auto f = perturbed_hom(a3, 1.0);
    std::mt19937_64 rng(2);
    const Element h = random_hermitian(a3, rng, 0.8);
    const Element a = a3->make(a3->random(rng, 0.5));
    const Element b = a3->make(a3->random(rng, 0.5));
    for (double t : {0.5, 1.0, 3.0}) {
        CHECK(defect_star(*f, h, t, 0) < 1e-15);
        CHECK(defect_star(*f, a, t, 0) < 1e-15);
        const double e = std::exp(-t);
        const Matrix A = m(a), B = m(b);
        const Matrix oracle = e * (A * B * B + A * A * B - A * B * A * B) + e * e * A * A * B * B;
        CHECK(defect_mul(*f, a, b, t, 0) == doctest::Approx(op_norm(oracle)).epsilon(1e-12));
        const Matrix add = -e * (A * B + B * A);
        CHECK(defect_add(*f, a, b, t, 0) == doctest::Approx(op_norm(add)).epsilon(1e-12));
    }
    const double ratio = defect_mul(*f, a, b, 2.0, 0) / defect_mul(*f, a, b, 1.0, 0);
    CHECK(ratio == doctest::Approx(std::exp(-1.0)).epsilon(0.2));
}

TEST_CASE("compression family")
{
    const auto m8 = matrix_algebra(8);
    const auto f = compression_family(m8, 1.0);
    const auto w = compression_weights(8, 1.0, 2.5);
    CHECK(w(0) == 1.0);
    CHECK(w(1) == 1.0);
    CHECK(w(2) == 0.5);
    CHECK(w(3) == 0.0);
    std::mt19937_64 rng(3);
    const Element a = m8->make(m8->random(rng, 1.0));
    const Element b = m8->make(m8->random(rng, 1.0));
    for (double t : {8.0, 8.5, 12.0}) {
        CHECK((*f)(a, t).same_payload(a));
        CHECK(defect_mul(*f, a, b, t, 0) == 0.0);
        CHECK(defect_add(*f, a, b, t, 0) == 0.0);
        CHECK(defect_star(*f, a, t, 0) == 0.0);
    }
    for (double t = 0.0; t <= 10.0; t += 0.5)
        CHECK((*f)(a, t).seminorm(0) <= a.seminorm(0) * (1 + 1e-14));
    // Direct oracle D a D.
    const double t = 3.3;
    Matrix d = Matrix::Zero(8, 8);
    for (int j = 0; j < 8; ++j)
        d(j, j) = std::clamp(t - j, 0.0, 1.0);
    CHECK(op_norm(m((*f)(a, t)) - d * m(a) * d) < 1e-15);
}

TEST_CASE("trace shift decays like 1/(1+t)")
{
    const auto a3 = matrix_algebra(3);
    const auto f = trace_shift_family(a3);
    std::mt19937_64 rng(5);
    const Element a = a3->make(a3->random(rng, 1.0));
    const Element b = a3->make(a3->random(rng, 1.0));
    for (double t : {0.0, 1.0, 9.0}) {
        const Matrix A = m(a), B = m(b), I = Matrix::Identity(3, 3);
        const double s = 1.0 / (1.0 + t);
        const Matrix oracle = (A + s * A.trace() * I) * (B + s * B.trace() * I) - (A * B + s * (A * B).trace() * I);
        CHECK(defect_mul(*f, a, b, t, 0) == doctest::Approx(op_norm(oracle)).epsilon(1e-12));
    }
    SamplingGrid grid{uniform_grid(0.0, 10.0, 0.5), {a, b}, {}, {0, 1}};
    const auto report = pbam_check(*f, grid, PbamTolerances{});
    CHECK(report.condition("mul").decaying);
}

TEST_CASE("toeplitz family structure")
{
    const auto s = smooth_circle_algebra(8);
    const auto m16 = matrix_algebra(16);
    const auto f = toeplitz_family(s, m16);
    const auto* c = as_circle(*s);
    const Element z = c->mode(1);
    const Element zb = c->mode(-1);
    // Order 5: shift matrix with ones on the first subdiagonal, T_{jl} = c_{j-l}.
    const Matrix t5 = m((*f)(z, 5.0));
    for (int j = 0; j < 16; ++j)
        for (int l = 0; l < 16; ++l) {
            const double expect = (j < 5 && l < 5 && j - l == 1) ? 1.0 : 0.0;
            CHECK(std::abs(t5(j, l) - expect) < 1e-14);
        }
    // Fractional order damps the last row and column.
    const Matrix t45 = m((*f)(z, 4.5));
    CHECK(std::abs(t45(4, 3) - 0.5) < 1e-14);
    // z zbar = 1, but T(z)T(zbar) - T(1) is a rank-one corner of norm 1.
    for (double order : {4.0, 8.0, 16.0}) {
        const double d = defect_mul(*f, z, zb, order, 0);
        CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
        const Matrix diff = m((*f)(z, order)) * m((*f)(zb, order)) - m((*f)(c->mode(0), order));
        Eigen::JacobiSVD<Matrix> svd(diff);
        CHECK(svd.singularValues()(1) < 1e-12);
    }
}

TEST_CASE("all built-ins preserve zero")
{
    const auto m4 = matrix_algebra(4);
    const auto s = smooth_circle_algebra(4);
    const std::vector<FamilyPtr> fams = {exact_hom(m4), compression_family(m4), perturbed_hom(m4),
                                         trace_shift_family(m4), toeplitz_family(s, m4)};
    for (const auto& f : fams)
        for (double t : {0.0, 0.7, 3.0, 11.0})
            CHECK((*f)(f->domain()->zero(), t).top_seminorm() == 0.0);
}

TEST_CASE("boundedness profiles")
{
    const auto m3 = matrix_algebra(3);
    std::mt19937_64 rng(6);
    const Element a = m3->make(m3->random(rng, 1.0));
    SamplingGrid grid{uniform_grid(0.0, 6.0, 0.5), {a}, {}, {0, 1, 2}};
    for (double v : boundedness_profile(*exact_hom(m3), a, grid))
        CHECK(v == doctest::Approx(a.seminorm(0)).epsilon(1e-15));
    for (double v : boundedness_profile(*compression_family(m3), a, grid))
        CHECK(v <= a.seminorm(0) * (1 + 1e-14));
    for (double v : boundedness_profile(*perturbed_hom(m3), a, grid))
        CHECK(v <= a.seminorm(0) + (a * a).seminorm(0) + 1e-14);
}

TEST_CASE("uniform grid")
{
    const auto g = uniform_grid(0.0, 1.0, 0.25);
    REQUIRE(g.size() == 5);
    CHECK(g.back() == 1.0);
    CHECK(uniform_grid(0.0, 20.0, 0.5).size() == 41);
}

TEST_CASE("modulus estimates")
{
    const auto m3 = matrix_algebra(3);
    std::mt19937_64 rng(7);
    const Element x = m3->make(m3->random(rng, 0.5));
    const auto ts = uniform_grid(0.0, 8.0, 0.5);
    ModulusOptions opts;
    const auto exact = sac_modulus_estimate(*exact_hom(m3), x, 0.25, ts, opts);
    CHECK(exact.found);
    CHECK(exact.eta == 0.25);
    CHECK(exact.p == 0.0);
    const auto comp = sac_modulus_estimate(*compression_family(m3), x, 0.25, ts, opts);
    CHECK(comp.found);
    CHECK(comp.eta == 0.25);
    const auto pert = sac_modulus_estimate(*perturbed_hom(m3), x, 0.25, ts, opts);
    CHECK(pert.found);
    CHECK(pert.eta <= 0.25);
}

TEST_CASE("pbam check")
{
    const auto m8 = matrix_algebra(8);
    std::mt19937_64 rng(8);
    SamplingGrid grid;
    grid.t_values = uniform_grid(0.0, 12.0, 0.5);
    for (int i = 0; i < 3; ++i)
        grid.test_elements.push_back(m8->make(m8->random(rng, 0.5)));
    grid.levels = {0, 1, 2, 3};
    const auto exact = pbam_check(*exact_hom(m8), grid, PbamTolerances{});
    CHECK(exact.pass);
    for (const auto& r : exact.rows)
        CHECK(r.star + r.scalar + r.add + r.mul == 0.0);
    const auto comp = pbam_check(*compression_family(m8), grid, PbamTolerances{});
    CHECK(comp.pass);
    for (const auto& r : comp.rows)
        if (r.t >= 8.0)
            CHECK(r.star + r.scalar + r.add + r.mul == 0.0);
    CHECK(comp.rows.size() == 3 * grid.t_values.size() * 4);
}

TEST_CASE("curve summaries")
{
    const auto flat = summarize_curve("x", {1.0, 1.0, 1.0, 1.0 - 1e-16}, 1e-9);
    CHECK_FALSE(flat.decaying);
    CHECK_FALSE(flat.pass);
    const auto dec = summarize_curve("x", {1.0, 0.5, 0.2, 0.1}, 1e-9);
    CHECK(dec.decaying);
    CHECK(dec.pass);
    const auto zero = summarize_curve("x", {0.0, 0.0, 0.0}, 1e-9);
    CHECK(zero.pass);
}

TEST_CASE("homotopy family endpoints are bit exact")
{
    const auto m3 = matrix_algebra(3);
    const auto p = path_algebra(m3, 7);
    const auto f = compression_family(m3, 1.0);
    const auto g = perturbed_hom(m3, 1.0);
    const auto h = linear_blend(f, g, p);
    std::mt19937_64 rng(9);
    const Element a = m3->make(m3->random(rng, 1.0));
    for (double t : {0.0, 0.3, 2.0, 5.0}) {
        const Element x = (*h)(a, t);
        CHECK(as_path(*p)->sample(x, 0).same_payload((*f)(a, t)));
        CHECK(as_path(*p)->sample(x, 6).same_payload((*g)(a, t)));
    }
}
