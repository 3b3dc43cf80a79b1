#include "pbam/element.hpp"

#include "pbam/algebra.hpp"
#include "pbam/errors.hpp"

namespace pbam {

Element::Element(AlgebraPtr owner, Payload payload)
    : owner_(std::move(owner)), payload_(std::move(payload))
{
    if (!owner_)
        throw Error("element without owner algebra");
    if (!owner_->valid_payload(payload_))
        throw Error("payload shape does not match algebra " + owner_->id() + " (" +
                    owner_->shape() + ")");
}

const Algebra& Element::algebra() const
{
    if (!owner_)
        throw Error("empty element");
    return *owner_;
}

const std::string& Element::algebra_id() const { return algebra().id(); }

bool Element::same_payload(const Element& other) const
{
    if (payload_.size() != other.payload_.size())
        return false;
    for (std::size_t i = 0; i < payload_.size(); ++i) {
        const auto& x = payload_[i];
        const auto& y = other.payload_[i];
        if (x.rows() != y.rows() || x.cols() != y.cols())
            return false;
        if (!(x.array() == y.array()).all())
            return false;
    }
    return true;
}

Element Element::adjoint() const { return Element(owner_, algebra().adjoint(payload_)); }

double Element::seminorm(int level) const { return algebra().seminorm(level, payload_); }

double Element::top_seminorm() const { return seminorm(algebra().top_level()); }

void require_same_owner(const Element& a, const Element& b, const char* what)
{
    if (a.empty() || b.empty())
        throw OwnerMismatch(std::string(what) + ": empty operand");
    if (a.owner() != b.owner() && a.algebra_id() != b.algebra_id())
        throw OwnerMismatch(std::string(what) + ": operands belong to " + a.algebra_id() +
                            " and " + b.algebra_id());
}

namespace {

template <class Op>
Payload blockwise(const Payload& a, const Payload& b, Op op)
{
    Payload out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(op(a[i], b[i]));
    return out;
}

} // namespace

Element operator+(const Element& a, const Element& b)
{
    require_same_owner(a, b, "add");
    return Element(a.owner_, blockwise(a.payload_, b.payload_,
                                       [](const Matrix& x, const Matrix& y) -> Matrix { return x + y; }));
}

Element operator-(const Element& a, const Element& b)
{
    require_same_owner(a, b, "subtract");
    return Element(a.owner_, blockwise(a.payload_, b.payload_,
                                       [](const Matrix& x, const Matrix& y) -> Matrix { return x - y; }));
}

Element operator-(const Element& a)
{
    Payload out;
    out.reserve(a.payload_.size());
    for (const auto& x : a.payload_)
        out.push_back(-x);
    return Element(a.owner_, std::move(out));
}

Element operator*(const Element& a, const Element& b)
{
    require_same_owner(a, b, "multiply");
    return Element(a.owner_, a.algebra().multiply(a.payload_, b.payload_));
}

Element operator*(Complex lambda, const Element& a)
{
    Payload out;
    out.reserve(a.payload_.size());
    for (const auto& x : a.payload_)
        out.push_back(lambda * x);
    return Element(a.owner_, std::move(out));
}

Element operator*(double lambda, const Element& a)
{
    Payload out;
    out.reserve(a.payload_.size());
    for (const auto& x : a.payload_)
        out.push_back(lambda * x);
    return Element(a.owner_, std::move(out));
}

} // namespace pbam
