#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pbam {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Payload = std::vector<Matrix>;

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

// A member of a concrete algebra instance. The payload is a list of complex
// blocks whose meaning is fixed by the owner (one k x k block for matrices,
// one column of grid samples for circle functions, one inner payload per
// p-sample for path algebras). Elements are immutable values.
class Element {
public:
    Element() = default;
    Element(AlgebraPtr owner, Payload payload);

    const Algebra& algebra() const;
    const AlgebraPtr& owner() const { return owner_; }
    const std::string& algebra_id() const;
    const Payload& payload() const { return payload_; }
    std::span<const Matrix> blocks() const { return payload_; }

    bool empty() const { return owner_ == nullptr; }

    /// Exact (value) equality of payloads; -0.0 == +0.0.
    bool same_payload(const Element& other) const;

    Element adjoint() const;

    double seminorm(int level) const;
    double top_seminorm() const;

    friend Element operator+(const Element& a, const Element& b);
    friend Element operator-(const Element& a, const Element& b);
    friend Element operator-(const Element& a);
    friend Element operator*(const Element& a, const Element& b);
    friend Element operator*(Complex lambda, const Element& a);
    friend Element operator*(double lambda, const Element& a);

private:
    AlgebraPtr owner_;
    Payload payload_;
};

/// Throws OwnerMismatch unless both elements live in the same algebra.
void require_same_owner(const Element& a, const Element& b, const char* what);

} // namespace pbam
