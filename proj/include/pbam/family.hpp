#pragma once

#include <functional>
#include <memory>
#include <string>

#include "pbam/algebra.hpp"
#include "pbam/element.hpp"

namespace pbam {

// A continuous family f_t : A -> B, t >= 0.
class AsymptoticFamily {
public:
    AsymptoticFamily(std::string id, AlgebraPtr domain, AlgebraPtr codomain, bool continuous = true);
    virtual ~AsymptoticFamily() = default;

    const std::string& id() const { return id_; }
    const AlgebraPtr& domain() const { return domain_; }
    const AlgebraPtr& codomain() const { return codomain_; }
    bool declared_continuous() const { return continuous_; }

    /// Checks ownership of `a` and t >= 0, then evaluates.
    Element operator()(const Element& a, double t) const;

protected:
    virtual Element eval(const Element& a, double t) const = 0;

private:
    std::string id_;
    AlgebraPtr domain_;
    AlgebraPtr codomain_;
    bool continuous_;
};

using FamilyPtr = std::shared_ptr<const AsymptoticFamily>;

/// f_t = identity on A.
FamilyPtr exact_hom(AlgebraPtr algebra, std::string id = {});

/// f_t(a) = D_t a D_t on M_N, D_t = diag(w_j), w_j(t) = clamp(ramp*t - j, 0, 1)
/// (0-based j), so f_t is the identity once ramp*t >= N.
FamilyPtr compression_family(AlgebraPtr matrices, double ramp = 1.0, std::string id = {});

/// f_t(a) = a + e^{-rate t} a^2.
FamilyPtr perturbed_hom(AlgebraPtr algebra, double rate = 1.0, std::string id = {});

/// f_t(a) = a + tr(a) 1 / (1 + t) on matrices.
FamilyPtr trace_shift_family(AlgebraPtr matrices, std::string id = {});

/// Circle functions to M_K: f_t(f) = D_t T_K(f) D_t with T_K(f)_{jl} = c_{j-l}(f)
/// and the compression weights above, i.e. the Toeplitz matrix of order
/// ceil(t) whose last row and column are damped by the fractional part of t.
FamilyPtr toeplitz_family(AlgebraPtr circle, AlgebraPtr matrices, std::string id = {});

/// Compression weights w_j(t) for a family of size n.
Eigen::VectorXd compression_weights(int n, double ramp, double t);

using BlendFn = std::function<Element(const Element& a, double t, double p)>;

// A -> C([0,1], B): h_t(a)(p) = blend(a, t, p), endpoints compared against F
// and G by pba_homotopy_check.
class HomotopyFamily final : public AsymptoticFamily {
public:
    HomotopyFamily(std::string id, FamilyPtr start, FamilyPtr end, AlgebraPtr path, BlendFn blend);

    const FamilyPtr& start() const { return start_; }
    const FamilyPtr& end() const { return end_; }
    Element blend(const Element& a, double t, double p) const { return blend_(a, t, p); }

protected:
    Element eval(const Element& a, double t) const override;

private:
    FamilyPtr start_;
    FamilyPtr end_;
    BlendFn blend_;
};

using HomotopyPtr = std::shared_ptr<const HomotopyFamily>;

/// h_t(a)(p) = (1-p) F_t(a) + p G_t(a).
HomotopyPtr linear_blend(FamilyPtr start, FamilyPtr end, AlgebraPtr path, std::string id = {});

/// General constructor around a user supplied blend.
HomotopyPtr homotopy_family(FamilyPtr start, FamilyPtr end, AlgebraPtr path, BlendFn blend,
                            std::string id = {});

} // namespace pbam
