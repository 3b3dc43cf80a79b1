#include "pbam/family.hpp"

#include <algorithm>
#include <cmath>

#include "pbam/errors.hpp"

namespace pbam {

AsymptoticFamily::AsymptoticFamily(std::string id, AlgebraPtr domain, AlgebraPtr codomain, bool continuous)
    : id_(std::move(id)), domain_(std::move(domain)), codomain_(std::move(codomain)), continuous_(continuous)
{
    if (!domain_ || !codomain_)
        throw Error("family " + id_ + ": missing domain or codomain");
}

Element AsymptoticFamily::operator()(const Element& a, double t) const
{
    if (a.algebra_id() != domain_->id())
        throw OwnerMismatch("family " + id_ + " expects elements of " + domain_->id() + ", got " +
                            a.algebra_id());
    if (!(t >= 0.0))
        throw Error("family " + id_ + ": negative or NaN time");
    return eval(a, t);
}

Eigen::VectorXd compression_weights(int n, double ramp, double t)
{
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j)
        w(j) = std::clamp(ramp * t - j, 0.0, 1.0);
    return w;
}

namespace {

class ExactHom final : public AsymptoticFamily {
public:
    ExactHom(std::string id, AlgebraPtr a) : AsymptoticFamily(std::move(id), a, a) {}

protected:
    Element eval(const Element& a, double) const override { return a; }
};

Matrix compress(const Matrix& m, const Eigen::VectorXd& w)
{
    Matrix out = m;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            out(i, j) = (w(i) * out(i, j)) * w(j);
    return out;
}

class Compression final : public AsymptoticFamily {
public:
    Compression(std::string id, AlgebraPtr m, double ramp)
        : AsymptoticFamily(std::move(id), m, m), ramp_(ramp)
    {
        if (!as_matrix(*m))
            throw Error("compression family needs a matrix algebra");
        if (!(ramp_ > 0.0))
            throw Error("compression ramp must be positive");
        n_ = as_matrix(*m)->size();
    }

protected:
    Element eval(const Element& a, double t) const override
    {
        return codomain()->make({compress(a.payload()[0], compression_weights(n_, ramp_, t))});
    }

private:
    double ramp_;
    int n_ = 0;
};

class Perturbed final : public AsymptoticFamily {
public:
    Perturbed(std::string id, AlgebraPtr a, double rate) : AsymptoticFamily(std::move(id), a, a), rate_(rate) {}

protected:
    Element eval(const Element& a, double t) const override { return a + std::exp(-rate_ * t) * (a * a); }

private:
    double rate_;
};

class TraceShift final : public AsymptoticFamily {
public:
    TraceShift(std::string id, AlgebraPtr m) : AsymptoticFamily(std::move(id), m, m)
    {
        if (!as_matrix(*m))
            throw Error("trace shift family needs a matrix algebra");
    }

protected:
    Element eval(const Element& a, double t) const override
    {
        const Matrix& x = a.payload()[0];
        const Complex shift = x.trace() / (1.0 + t);
        return codomain()->make({x + shift * Matrix::Identity(x.rows(), x.cols())});
    }
};

class Toeplitz final : public AsymptoticFamily {
public:
    Toeplitz(std::string id, AlgebraPtr circle, AlgebraPtr m) : AsymptoticFamily(std::move(id), circle, m)
    {
        circle_ = as_circle(*circle);
        const auto* mat = as_matrix(*m);
        if (!circle_ || !mat)
            throw Error("toeplitz family maps a circle algebra to a matrix algebra");
        k_ = mat->size();
    }

protected:
    Element eval(const Element& a, double t) const override
    {
        const auto c = circle_->fourier(a, k_ - 1);
        Matrix toe(k_, k_);
        for (int j = 0; j < k_; ++j)
            for (int l = 0; l < k_; ++l)
                toe(j, l) = c[static_cast<std::size_t>(j - l + k_ - 1)];
        return codomain()->make({compress(toe, compression_weights(k_, 1.0, t))});
    }

private:
    const CircleAlgebra* circle_ = nullptr;
    int k_ = 0;
};

} // namespace

FamilyPtr exact_hom(AlgebraPtr algebra, std::string id)
{
    if (id.empty())
        id = "exact(" + algebra->id() + ")";
    return std::make_shared<ExactHom>(std::move(id), std::move(algebra));
}

FamilyPtr compression_family(AlgebraPtr matrices, double ramp, std::string id)
{
    if (id.empty())
        id = "compression(" + matrices->id() + ")";
    return std::make_shared<Compression>(std::move(id), std::move(matrices), ramp);
}

FamilyPtr perturbed_hom(AlgebraPtr algebra, double rate, std::string id)
{
    if (id.empty())
        id = "perturbed(" + algebra->id() + ")";
    return std::make_shared<Perturbed>(std::move(id), std::move(algebra), rate);
}

FamilyPtr trace_shift_family(AlgebraPtr matrices, std::string id)
{
    if (id.empty())
        id = "trace_shift(" + matrices->id() + ")";
    return std::make_shared<TraceShift>(std::move(id), std::move(matrices));
}

FamilyPtr toeplitz_family(AlgebraPtr circle, AlgebraPtr matrices, std::string id)
{
    if (id.empty())
        id = "toeplitz(" + circle->id() + "->" + matrices->id() + ")";
    return std::make_shared<Toeplitz>(std::move(id), std::move(circle), std::move(matrices));
}

// ---------------------------------------------------------------- homotopy

HomotopyFamily::HomotopyFamily(std::string id, FamilyPtr start, FamilyPtr end, AlgebraPtr path, BlendFn blend)
    : AsymptoticFamily(std::move(id), start ? start->domain() : nullptr, path),
      start_(std::move(start)), end_(std::move(end)), blend_(std::move(blend))
{
    const auto* p = as_path(*codomain());
    if (!p)
        throw InvalidHomotopy("homotopy codomain must be a path algebra");
    if (!end_ || end_->domain()->id() != start_->domain()->id())
        throw InvalidHomotopy("homotopy endpoints have different domains");
    if (start_->codomain()->id() != p->inner()->id() || end_->codomain()->id() != p->inner()->id())
        throw InvalidHomotopy("homotopy endpoints must map into " + p->inner()->id());
}

Element HomotopyFamily::eval(const Element& a, double t) const
{
    const auto* path = as_path(*codomain());
    std::vector<Element> samples;
    samples.reserve(static_cast<std::size_t>(path->points()));
    for (int i = 0; i < path->points(); ++i)
        samples.push_back(blend_(a, t, path->p_value(i)));
    return path->from_samples(samples);
}

HomotopyPtr linear_blend(FamilyPtr start, FamilyPtr end, AlgebraPtr path, std::string id)
{
    if (id.empty())
        id = "blend(" + start->id() + "," + end->id() + ")";
    BlendFn fn = [start, end](const Element& a, double t, double p) {
        return (1.0 - p) * (*start)(a, t) + p * (*end)(a, t);
    };
    return std::make_shared<HomotopyFamily>(std::move(id), start, end, std::move(path), std::move(fn));
}

HomotopyPtr homotopy_family(FamilyPtr start, FamilyPtr end, AlgebraPtr path, BlendFn blend, std::string id)
{
    if (id.empty())
        id = "homotopy(" + start->id() + "," + end->id() + ")";
    return std::make_shared<HomotopyFamily>(std::move(id), std::move(start), std::move(end), std::move(path),
                                            std::move(blend));
}

} // namespace pbam
