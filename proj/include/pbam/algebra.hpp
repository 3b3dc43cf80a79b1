#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pbam/element.hpp"

namespace pbam {

// A concrete seminormed *-algebra. Seminorm levels are non-decreasing by
// construction and satisfy |a*|_n <= |a|_{n+1}, |ab|_n <= |a|_{n+1}|b|_{n+1}.
class Algebra : public std::enable_shared_from_this<Algebra> {
public:
    Algebra(std::string id, int levels);
    virtual ~Algebra() = default;

    const std::string& id() const { return id_; }
    int levels() const { return levels_; }
    int top_level() const { return levels_ - 1; }

    virtual std::string kind() const = 0;
    virtual std::string shape() const = 0;

    Element zero() const;
    Element make(Payload payload) const;

    // Payload-level operations. Callers are responsible for shape checks;
    // Element-level wrappers perform owner checks.
    virtual Payload zero_payload() const = 0;
    virtual bool valid_payload(const Payload& p) const = 0;
    virtual Payload multiply(const Payload& a, const Payload& b) const = 0;
    virtual Payload adjoint(const Payload& a) const = 0;

    /// All levels at once; entry n is |a|_n.
    virtual std::vector<double> seminorms(const Payload& a) const = 0;
    double seminorm(int level, const Payload& a) const;

    /// Applies fn to a self-adjoint payload through its spectral
    /// decomposition (pointwise for function algebras). The input is
    /// symmetrized first.
    virtual Payload hermitian_calculus(const Payload& a,
                                       const std::function<Complex(double)>& fn) const = 0;

    /// Returns a' with (1+a)(1+a') = 1, i.e. (1+a)^{-1} - 1.
    /// Throws NotQuasiInvertible when 1+a is numerically singular.
    virtual Payload quasi_inverse(const Payload& a) const = 0;

    /// Random element with entries of size about `scale`.
    virtual Payload random(std::mt19937_64& rng, double scale) const = 0;

    /// Random quasi-unitary: 1 + u is unitary.
    virtual Payload random_quasi_unitary(std::mt19937_64& rng) const = 0;

private:
    std::string id_;
    int levels_;
};

/// M_k(C), every seminorm level equal to the operator norm.
AlgebraPtr matrix_algebra(int k, int levels = 6, std::string id = {});

/// Trigonometric functions on the circle stored as samples on a uniform
/// theta-grid of 8 * degree_cap points. |f|_n = sum_{j<=n} sup|f^(j)| / j!,
/// with derivatives taken spectrally.
AlgebraPtr smooth_circle_algebra(int degree_cap, int levels = 6, std::string id = {});

/// C([0,1], B) sampled on a uniform p-grid (endpoints included) with the
/// supremum seminorms sup_p |x(p)|_n.
AlgebraPtr path_algebra(AlgebraPtr inner, int p_grid_size, std::string id = {});

// Downcast helpers for instance-specific queries.
class MatrixAlgebra;
class CircleAlgebra;
class PathAlgebra;

class MatrixAlgebra final : public Algebra {
public:
    MatrixAlgebra(std::string id, int k, int levels);
    int size() const { return k_; }

    std::string kind() const override { return "matrix"; }
    std::string shape() const override;
    Payload zero_payload() const override;
    bool valid_payload(const Payload& p) const override;
    Payload multiply(const Payload& a, const Payload& b) const override;
    Payload adjoint(const Payload& a) const override;
    std::vector<double> seminorms(const Payload& a) const override;
    Payload hermitian_calculus(const Payload& a,
                               const std::function<Complex(double)>& fn) const override;
    Payload quasi_inverse(const Payload& a) const override;
    Payload random(std::mt19937_64& rng, double scale) const override;
    Payload random_quasi_unitary(std::mt19937_64& rng) const override;

    Element from_matrix(Matrix m) const;

private:
    int k_;
};

class CircleAlgebra final : public Algebra {
public:
    CircleAlgebra(std::string id, int degree_cap, int levels);
    int degree_cap() const { return cap_; }
    int samples() const { return n_; }
    double theta(int m) const;

    std::string kind() const override { return "circle"; }
    std::string shape() const override;
    Payload zero_payload() const override;
    bool valid_payload(const Payload& p) const override;
    Payload multiply(const Payload& a, const Payload& b) const override;
    Payload adjoint(const Payload& a) const override;
    std::vector<double> seminorms(const Payload& a) const override;
    Payload hermitian_calculus(const Payload& a,
                               const std::function<Complex(double)>& fn) const override;
    Payload quasi_inverse(const Payload& a) const override;
    Payload random(std::mt19937_64& rng, double scale) const override;
    Payload random_quasi_unitary(std::mt19937_64& rng) const override;

    /// Fourier coefficient c_k for |k| < samples/2; zero beyond Nyquist.
    std::vector<Complex> fourier(const Element& f, int max_abs_k) const;
    /// sum_k c_k e^{ik theta} sampled on the grid; coefficients indexed
    /// from -max_abs_k.
    Element from_fourier(const std::vector<Complex>& coeffs, int max_abs_k) const;
    Element mode(int k) const;
    Element from_function(const std::function<Complex(double)>& f) const;

private:
    int cap_;
    int n_;
};

class PathAlgebra final : public Algebra {
public:
    PathAlgebra(std::string id, AlgebraPtr inner, int points);
    const AlgebraPtr& inner() const { return inner_; }
    int points() const { return points_; }
    double p_value(int i) const;

    std::string kind() const override { return "path"; }
    std::string shape() const override;
    Payload zero_payload() const override;
    bool valid_payload(const Payload& p) const override;
    Payload multiply(const Payload& a, const Payload& b) const override;
    Payload adjoint(const Payload& a) const override;
    std::vector<double> seminorms(const Payload& a) const override;
    Payload hermitian_calculus(const Payload& a,
                               const std::function<Complex(double)>& fn) const override;
    Payload quasi_inverse(const Payload& a) const override;
    Payload random(std::mt19937_64& rng, double scale) const override;
    Payload random_quasi_unitary(std::mt19937_64& rng) const override;

    Element sample(const Element& path, int i) const;
    Element from_samples(const std::vector<Element>& samples) const;

private:
    std::size_t inner_blocks() const;
    Payload slice(const Payload& p, int i) const;

    AlgebraPtr inner_;
    int points_;
};

const MatrixAlgebra* as_matrix(const Algebra& a);
const CircleAlgebra* as_circle(const Algebra& a);
const PathAlgebra* as_path(const Algebra& a);

} // namespace pbam
