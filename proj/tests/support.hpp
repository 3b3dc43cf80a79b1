#pragma once

#include <complex>
#include <initializer_list>
#include <random>

#include "pbam/algebra.hpp"
#include "pbam/element.hpp"

namespace testing {

using pbam::Complex;
using pbam::Element;
using pbam::Matrix;

inline Element mat(const pbam::AlgebraPtr& a, std::initializer_list<std::initializer_list<Complex>> rows)
{
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (const auto& x : r)
            m(i, j++) = x;
        ++i;
    }
    return pbam::as_matrix(*a)->from_matrix(m);
}

inline Element scalar(const pbam::AlgebraPtr& a, Complex z) { return mat(a, {{z}}); }

inline Complex value(const Element& x) { return x.payload()[0](0, 0); }

inline Matrix m(const Element& x) { return x.payload()[0]; }

inline double op_norm(const Matrix& x)
{
    if (x.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<Matrix> svd(x);
    return svd.singularValues()(0);
}

inline Element random_hermitian(const pbam::AlgebraPtr& a, std::mt19937_64& rng, double norm)
{
    const Element h = a->make(a->random(rng, 1.0));
    Matrix s = m(h) + m(h).adjoint();
    s *= norm / op_norm(s);
    s = 0.5 * (s + s.adjoint()).eval();
    return pbam::as_matrix(*a)->from_matrix(s);
}

} // namespace testing
