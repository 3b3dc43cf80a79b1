#pragma once

#include <utility>
#include <vector>

namespace pbam {

struct Dot {
    double t = 0.0;
    double s = 0.0;
};

// Piecewise-linear non-decreasing [0, inf) -> [0, inf) through its dots.
// Before the first dot the value is s_0; after the last dot the final
// slope is continued.
class Reparameterization {
public:
    Reparameterization() = default;
    explicit Reparameterization(std::vector<Dot> dots);

    double operator()(double t) const;
    const std::vector<Dot>& dots() const { return dots_; }
    double final_slope() const;

    /// phi + delta.
    Reparameterization shifted(double delta) const;

    static Reparameterization identity();
    static Reparameterization constant(double s);

private:
    std::vector<Dot> dots_;
};

/// Cumulative max of the constraint values, then joins the dots.
Reparameterization join_dots_phi(const std::vector<Dot>& constraints);

/// Exact piecewise-linear pointwise maximum, crossings included.
Reparameterization pointwise_max(const std::vector<Reparameterization>& parts);

} // namespace pbam
