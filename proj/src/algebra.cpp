#include "pbam/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include "pbam/errors.hpp"

namespace pbam {

Algebra::Algebra(std::string id, int levels) : id_(std::move(id)), levels_(levels)
{
    if (levels_ < 4)
        throw Error("algebra " + id_ + ": at least 4 seminorm levels are required");
}

Element Algebra::zero() const { return Element(shared_from_this(), zero_payload()); }

Element Algebra::make(Payload payload) const { return Element(shared_from_this(), std::move(payload)); }

double Algebra::seminorm(int level, const Payload& a) const
{
    if (level < 0 || level >= levels_)
        throw LevelOutOfRange("seminorm level " + std::to_string(level) + " outside [0, " +
                              std::to_string(levels_ - 1) + "] for " + id_);
    return seminorms(a)[static_cast<std::size_t>(level)];
}

// ---------------------------------------------------------------- matrices

MatrixAlgebra::MatrixAlgebra(std::string id, int k, int levels) : Algebra(std::move(id), levels), k_(k)
{
    if (k_ < 1)
        throw Error("matrix algebra size must be positive");
}

std::string MatrixAlgebra::shape() const
{
    return "matrix " + std::to_string(k_) + "x" + std::to_string(k_);
}

Payload MatrixAlgebra::zero_payload() const { return {Matrix::Zero(k_, k_)}; }

bool MatrixAlgebra::valid_payload(const Payload& p) const
{
    return p.size() == 1 && p[0].rows() == k_ && p[0].cols() == k_;
}

Payload MatrixAlgebra::multiply(const Payload& a, const Payload& b) const { return {a[0] * b[0]}; }

Payload MatrixAlgebra::adjoint(const Payload& a) const { return {a[0].adjoint()}; }

std::vector<double> MatrixAlgebra::seminorms(const Payload& a) const
{
    double norm = 0.0;
    const Matrix& m = a[0];
    if (k_ == 1) {
        norm = std::abs(m(0, 0));
    } else if (!m.isZero(0.0)) {
        if (k_ <= 16) {
            Eigen::JacobiSVD<Matrix> svd(m);
            norm = svd.singularValues()(0);
        } else {
            Eigen::BDCSVD<Matrix> svd(m);
            norm = svd.singularValues()(0);
        }
    }
    return std::vector<double>(static_cast<std::size_t>(levels()), norm);
}

Payload MatrixAlgebra::hermitian_calculus(const Payload& a,
                                          const std::function<Complex(double)>& fn) const
{
    const Matrix h = (a[0] + a[0].adjoint()) * 0.5;
    if (k_ == 1)
        return {Matrix::Constant(1, 1, fn(h(0, 0).real()))};
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success)
        throw Error("hermitian eigendecomposition failed");
    Eigen::VectorXcd values(k_);
    for (int i = 0; i < k_; ++i)
        values(i) = fn(eig.eigenvalues()(i));
    const Matrix& v = eig.eigenvectors();
    return {v * values.asDiagonal() * v.adjoint()};
}

Payload MatrixAlgebra::quasi_inverse(const Payload& a) const
{
    const Matrix unit_plus = Matrix::Identity(k_, k_) + a[0];
    Eigen::PartialPivLU<Matrix> lu(unit_plus);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
        throw NotQuasiInvertible("1 + a is numerically singular (rcond " + std::to_string(rcond) + ")");
    // (1+a)^{-1} - 1 = -(1+a)^{-1} a, which avoids cancellation for small a.
    return {-lu.solve(a[0])};
}

Payload MatrixAlgebra::random(std::mt19937_64& rng, double scale) const
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(k_, k_);
    const double s = scale / std::sqrt(2.0);
    for (int j = 0; j < k_; ++j)
        for (int i = 0; i < k_; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Complex(s * re, s * im);
        }
    return {m};
}

Payload MatrixAlgebra::random_quasi_unitary(std::mt19937_64& rng) const
{
    // Haar unitary: QR of a Ginibre matrix with the phases of diag(R) removed.
    const Matrix g = random(rng, 1.0)[0];
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < k_; ++i) {
        const Complex d = r(i, i);
        const double mag = std::abs(d);
        if (mag > 0.0)
            q.col(i) *= d / mag;
    }
    return {q - Matrix::Identity(k_, k_)};
}

Element MatrixAlgebra::from_matrix(Matrix m) const { return make({std::move(m)}); }

// ------------------------------------------------------------------ circle

CircleAlgebra::CircleAlgebra(std::string id, int degree_cap, int levels)
    : Algebra(std::move(id), levels), cap_(degree_cap), n_(8 * degree_cap)
{
    if (cap_ < 1)
        throw Error("circle degree cap must be positive");
}

double CircleAlgebra::theta(int m) const { return 2.0 * std::numbers::pi * m / n_; }

std::string CircleAlgebra::shape() const
{
    return "circle cap=" + std::to_string(cap_) + " samples=" + std::to_string(n_);
}

Payload CircleAlgebra::zero_payload() const { return {Matrix::Zero(n_, 1)}; }

bool CircleAlgebra::valid_payload(const Payload& p) const
{
    return p.size() == 1 && p[0].rows() == n_ && p[0].cols() == 1;
}

Payload CircleAlgebra::multiply(const Payload& a, const Payload& b) const
{
    return {a[0].cwiseProduct(b[0])};
}

Payload CircleAlgebra::adjoint(const Payload& a) const { return {a[0].conjugate()}; }

std::vector<double> CircleAlgebra::seminorms(const Payload& a) const
{
    std::vector<double> out(static_cast<std::size_t>(levels()));
    const Eigen::VectorXcd samples = a[0].col(0);
    double total = samples.cwiseAbs().maxCoeff();
    out[0] = total;
    if (levels() == 1)
        return out;

    Eigen::FFT<double> fft;
    std::vector<Complex> in(samples.data(), samples.data() + n_);
    std::vector<Complex> coeffs;
    fft.fwd(coeffs, in);

    std::vector<Complex> spectrum(static_cast<std::size_t>(n_));
    std::vector<Complex> values;
    double factorial = 1.0;
    for (int j = 1; j < levels(); ++j) {
        factorial *= j;
        for (int m = 0; m < n_; ++m) {
            int k = m < n_ / 2 ? m : m - n_;
            if (2 * m == n_)
                k = 0; // Nyquist mode has no well-defined derivative.
            const Complex ik(0.0, static_cast<double>(k));
            spectrum[static_cast<std::size_t>(m)] = coeffs[static_cast<std::size_t>(m)] * std::pow(ik, j);
        }
        fft.inv(values, spectrum);
        double sup = 0.0;
        for (const auto& v : values)
            sup = std::max(sup, std::abs(v));
        total += sup / factorial;
        out[static_cast<std::size_t>(j)] = total;
    }
    return out;
}

Payload CircleAlgebra::hermitian_calculus(const Payload& a,
                                          const std::function<Complex(double)>& fn) const
{
    Matrix out(n_, 1);
    for (int m = 0; m < n_; ++m)
        out(m, 0) = fn(a[0](m, 0).real());
    return {out};
}

Payload CircleAlgebra::quasi_inverse(const Payload& a) const
{
    Matrix out(n_, 1);
    for (int m = 0; m < n_; ++m) {
        const Complex f = a[0](m, 0);
        const Complex unit_plus = 1.0 + f;
        if (std::abs(unit_plus) < 1e-12)
            throw NotQuasiInvertible("1 + f vanishes at theta = " + std::to_string(theta(m)));
        out(m, 0) = -f / unit_plus;
    }
    return {out};
}

Element CircleAlgebra::from_fourier(const std::vector<Complex>& coeffs, int max_abs_k) const
{
    Matrix out = Matrix::Zero(n_, 1);
    for (int m = 0; m < n_; ++m) {
        Complex acc = 0.0;
        for (int k = -max_abs_k; k <= max_abs_k; ++k) {
            const Complex c = coeffs[static_cast<std::size_t>(k + max_abs_k)];
            if (c != 0.0)
                acc += c * std::polar(1.0, k * theta(m));
        }
        out(m, 0) = acc;
    }
    return make({out});
}

Payload CircleAlgebra::random(std::mt19937_64& rng, double scale) const
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * cap_ + 1));
    for (int k = -cap_; k <= cap_; ++k) {
        const double decay = scale / ((1.0 + std::abs(k)) * (1.0 + std::abs(k)));
        const double re = normal(rng);
        const double im = normal(rng);
        coeffs[static_cast<std::size_t>(k + cap_)] = decay * Complex(re, im) / std::sqrt(2.0);
    }
    return from_fourier(coeffs, cap_).payload();
}

Payload CircleAlgebra::random_quasi_unitary(std::mt19937_64& rng) const
{
    // exp(i h) - 1 for a random real trigonometric phase h.
    const int deg = std::max(1, cap_ / 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * deg + 1), 0.0);
    coeffs[static_cast<std::size_t>(deg)] = normal(rng);
    for (int k = 1; k <= deg; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        const Complex c = Complex(re, im) / (1.0 + k * k);
        coeffs[static_cast<std::size_t>(deg + k)] = c;
        coeffs[static_cast<std::size_t>(deg - k)] = std::conj(c);
    }
    const Element h = from_fourier(coeffs, deg);
    Matrix out(n_, 1);
    for (int m = 0; m < n_; ++m)
        out(m, 0) = std::polar(1.0, h.payload()[0](m, 0).real()) - 1.0;
    return {out};
}

std::vector<Complex> CircleAlgebra::fourier(const Element& f, int max_abs_k) const
{
    if (f.algebra_id() != id())
        throw OwnerMismatch("fourier: element belongs to " + f.algebra_id());
    Eigen::FFT<double> fft;
    const Eigen::VectorXcd samples = f.payload()[0].col(0);
    std::vector<Complex> in(samples.data(), samples.data() + n_);
    std::vector<Complex> raw;
    fft.fwd(raw, in);
    std::vector<Complex> out(static_cast<std::size_t>(2 * max_abs_k + 1), 0.0);
    for (int k = -max_abs_k; k <= max_abs_k; ++k) {
        if (2 * std::abs(k) >= n_)
            continue;
        const int m = k >= 0 ? k : k + n_;
        out[static_cast<std::size_t>(k + max_abs_k)] = raw[static_cast<std::size_t>(m)] / static_cast<double>(n_);
    }
    return out;
}

Element CircleAlgebra::mode(int k) const
{
    Matrix out(n_, 1);
    for (int m = 0; m < n_; ++m)
        out(m, 0) = std::polar(1.0, k * theta(m));
    return make({out});
}

Element CircleAlgebra::from_function(const std::function<Complex(double)>& f) const
{
    Matrix out(n_, 1);
    for (int m = 0; m < n_; ++m)
        out(m, 0) = f(theta(m));
    return make({out});
}

// -------------------------------------------------------------------- path

PathAlgebra::PathAlgebra(std::string id, AlgebraPtr inner, int points)
    : Algebra(std::move(id), inner ? inner->levels() : 4), inner_(std::move(inner)), points_(points)
{
    if (!inner_)
        throw Error("path algebra needs an inner algebra");
    if (points_ < 2)
        throw Error("path algebra needs at least 2 p-grid points");
}

double PathAlgebra::p_value(int i) const
{
    if (i == points_ - 1)
        return 1.0;
    return static_cast<double>(i) / (points_ - 1);
}

std::string PathAlgebra::shape() const
{
    return "path points=" + std::to_string(points_) + " over " + inner_->id();
}

std::size_t PathAlgebra::inner_blocks() const { return inner_->zero_payload().size(); }

Payload PathAlgebra::slice(const Payload& p, int i) const
{
    const std::size_t nb = inner_blocks();
    const auto first = p.begin() + static_cast<std::ptrdiff_t>(nb * static_cast<std::size_t>(i));
    return Payload(first, first + static_cast<std::ptrdiff_t>(nb));
}

Payload PathAlgebra::zero_payload() const
{
    Payload out;
    const Payload z = inner_->zero_payload();
    for (int i = 0; i < points_; ++i)
        out.insert(out.end(), z.begin(), z.end());
    return out;
}

bool PathAlgebra::valid_payload(const Payload& p) const
{
    const std::size_t nb = inner_blocks();
    if (p.size() != nb * static_cast<std::size_t>(points_))
        return false;
    for (int i = 0; i < points_; ++i)
        if (!inner_->valid_payload(slice(p, i)))
            return false;
    return true;
}

namespace {

template <class Op>
Payload per_sample(const Payload& a, int points, std::size_t nb, Op op)
{
    Payload out;
    out.reserve(a.size());
    for (int i = 0; i < points; ++i) {
        const auto first = a.begin() + static_cast<std::ptrdiff_t>(nb * static_cast<std::size_t>(i));
        Payload s(first, first + static_cast<std::ptrdiff_t>(nb));
        Payload r = op(i, s);
        out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return out;
}

} // namespace

Payload PathAlgebra::multiply(const Payload& a, const Payload& b) const
{
    return per_sample(a, points_, inner_blocks(),
                      [&](int i, const Payload& s) { return inner_->multiply(s, slice(b, i)); });
}

Payload PathAlgebra::adjoint(const Payload& a) const
{
    return per_sample(a, points_, inner_blocks(), [&](int, const Payload& s) { return inner_->adjoint(s); });
}

std::vector<double> PathAlgebra::seminorms(const Payload& a) const
{
    std::vector<double> out(static_cast<std::size_t>(levels()), 0.0);
    for (int i = 0; i < points_; ++i) {
        const auto s = inner_->seminorms(slice(a, i));
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] = std::max(out[n], s[n]);
    }
    return out;
}

Payload PathAlgebra::hermitian_calculus(const Payload& a,
                                        const std::function<Complex(double)>& fn) const
{
    return per_sample(a, points_, inner_blocks(),
                      [&](int, const Payload& s) { return inner_->hermitian_calculus(s, fn); });
}

Payload PathAlgebra::quasi_inverse(const Payload& a) const
{
    return per_sample(a, points_, inner_blocks(),
                      [&](int, const Payload& s) { return inner_->quasi_inverse(s); });
}

Payload PathAlgebra::random(std::mt19937_64& rng, double scale) const
{
    const Payload x0 = inner_->random(rng, scale);
    const Payload x1 = inner_->random(rng, scale);
    return per_sample(zero_payload(), points_, inner_blocks(), [&](int i, const Payload&) {
        const double p = p_value(i);
        Payload s;
        for (std::size_t b = 0; b < x0.size(); ++b)
            s.push_back((1.0 - p) * x0[b] + p * x1[b]);
        return s;
    });
}

Payload PathAlgebra::random_quasi_unitary(std::mt19937_64& rng) const
{
    // (1 + u0) exp(i p h) - 1 traces a continuous path of quasi-unitaries.
    const Payload u0 = inner_->random_quasi_unitary(rng);
    const Payload x = inner_->random(rng, 1.0);
    const Payload h = inner_->hermitian_calculus(x, [](double v) { return Complex(v, 0.0); });
    return per_sample(zero_payload(), points_, inner_blocks(), [&](int i, const Payload&) {
        const double p = p_value(i);
        const Payload w = inner_->hermitian_calculus(
            h, [p](double v) { return std::polar(1.0, p * v) - 1.0; });
        // (1+u0)(1+w) - 1 = u0 + w + u0 w
        const Payload uw = inner_->multiply(u0, w);
        Payload s;
        for (std::size_t b = 0; b < u0.size(); ++b)
            s.push_back(u0[b] + w[b] + uw[b]);
        return s;
    });
}

Element PathAlgebra::sample(const Element& path, int i) const
{
    if (path.algebra_id() != id())
        throw OwnerMismatch("sample: element belongs to " + path.algebra_id());
    if (i < 0 || i >= points_)
        throw Error("path sample index out of range");
    return inner_->make(slice(path.payload(), i));
}

Element PathAlgebra::from_samples(const std::vector<Element>& samples) const
{
    if (static_cast<int>(samples.size()) != points_)
        throw Error("path needs one sample per p-grid point");
    Payload out;
    for (const auto& s : samples) {
        if (s.algebra_id() != inner_->id())
            throw OwnerMismatch("path sample belongs to " + s.algebra_id());
        out.insert(out.end(), s.payload().begin(), s.payload().end());
    }
    return make(std::move(out));
}

// --------------------------------------------------------------- factories

AlgebraPtr matrix_algebra(int k, int levels, std::string id)
{
    if (id.empty())
        id = "M" + std::to_string(k);
    return std::make_shared<MatrixAlgebra>(std::move(id), k, levels);
}

AlgebraPtr smooth_circle_algebra(int degree_cap, int levels, std::string id)
{
    if (id.empty())
        id = "S" + std::to_string(degree_cap);
    return std::make_shared<CircleAlgebra>(std::move(id), degree_cap, levels);
}

AlgebraPtr path_algebra(AlgebraPtr inner, int p_grid_size, std::string id)
{
    if (id.empty())
        id = "C[" + (inner ? inner->id() : std::string("?")) + "]" + std::to_string(p_grid_size);
    return std::make_shared<PathAlgebra>(std::move(id), std::move(inner), p_grid_size);
}

const MatrixAlgebra* as_matrix(const Algebra& a) { return dynamic_cast<const MatrixAlgebra*>(&a); }
const CircleAlgebra* as_circle(const Algebra& a) { return dynamic_cast<const CircleAlgebra*>(&a); }
const PathAlgebra* as_path(const Algebra& a) { return dynamic_cast<const PathAlgebra*>(&a); }

} // namespace pbam
