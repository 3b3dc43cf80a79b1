#include "pbam/reparam.hpp"

#include <algorithm>
#include <cmath>

#include "pbam/errors.hpp"

namespace pbam {

Reparameterization::Reparameterization(std::vector<Dot> dots) : dots_(std::move(dots))
{
    if (dots_.empty())
        throw Error("reparameterization needs at least one dot");
    for (std::size_t i = 0; i < dots_.size(); ++i) {
        if (!std::isfinite(dots_[i].t) || !std::isfinite(dots_[i].s))
            throw Error("reparameterization dots must be finite");
        if (dots_[i].s < 0.0)
            throw Error("reparameterization values must be non-negative");
        if (i > 0 && !(dots_[i].t > dots_[i - 1].t))
            throw Error("reparameterization dots need strictly increasing t");
        if (i > 0 && dots_[i].s < dots_[i - 1].s)
            throw Error("reparameterization dots need non-decreasing s");
    }
}

double Reparameterization::final_slope() const
{
    if (dots_.size() < 2)
        return 0.0;
    const Dot& a = dots_[dots_.size() - 2];
    const Dot& b = dots_.back();
    return (b.s - a.s) / (b.t - a.t);
}

double Reparameterization::operator()(double t) const
{
    if (dots_.empty())
        throw Error("empty reparameterization");
    if (t <= dots_.front().t)
        return dots_.front().s;
    if (t >= dots_.back().t)
        return dots_.back().s + final_slope() * (t - dots_.back().t);
    const auto it = std::upper_bound(dots_.begin(), dots_.end(), t, [](double x, const Dot& d) { return x < d.t; });
    const Dot& b = *it;
    const Dot& a = *(it - 1);
    if (t == a.t)
        return a.s;
    const double w = (t - a.t) / (b.t - a.t);
    return a.s + w * (b.s - a.s);
}

Reparameterization Reparameterization::shifted(double delta) const
{
    std::vector<Dot> out = dots_;
    for (auto& d : out)
        d.s += delta;
    return Reparameterization(std::move(out));
}

Reparameterization Reparameterization::identity() { return Reparameterization({{0.0, 0.0}, {1.0, 1.0}}); }

Reparameterization Reparameterization::constant(double s) { return Reparameterization({{0.0, s}}); }

Reparameterization join_dots_phi(const std::vector<Dot>& constraints)
{
    if (constraints.empty())
        throw Error("join_dots_phi: no constraints");
    std::vector<Dot> dots = constraints;
    double running = 0.0;
    for (auto& d : dots) {
        running = std::max(running, d.s);
        d.s = running;
    }
    return Reparameterization(std::move(dots));
}

Reparameterization pointwise_max(const std::vector<Reparameterization>& parts)
{
    if (parts.empty())
        throw Error("pointwise_max of no reparameterizations");
    std::vector<double> knots;
    for (const auto& p : parts)
        for (const auto& d : p.dots())
            knots.push_back(d.t);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const auto value = [&](double t) {
        double v = 0.0;
        for (const auto& p : parts)
            v = std::max(v, p(t));
        return v;
    };

    // Between consecutive knots (and beyond the last) every part is affine;
    // add the pairwise crossings there.
    std::vector<double> extra;
    const auto crossings = [&](double lo, double hi, bool unbounded) {
        const double probe = unbounded ? lo + 1.0 : 0.5 * (lo + hi);
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                const double ai = parts[i](lo), aj = parts[j](lo);
                const double si = unbounded ? parts[i](probe) - ai : (parts[i](hi) - ai) / (hi - lo);
                const double sj = unbounded ? parts[j](probe) - aj : (parts[j](hi) - aj) / (hi - lo);
                if (si == sj)
                    continue;
                const double x = lo + (aj - ai) / (si - sj);
                if (x > lo && (unbounded || x < hi))
                    extra.push_back(x);
            }
    };
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        crossings(knots[k], knots[k + 1], false);
    crossings(knots.back(), knots.back(), true);

    knots.insert(knots.end(), extra.begin(), extra.end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<Dot> dots;
    for (double t : knots)
        dots.push_back({t, value(t)});
    // One more dot past the last knot fixes the final slope of the max.
    const double tail_t = knots.back() + 1.0;
    dots.push_back({tail_t, value(tail_t)});
    for (std::size_t i = 1; i < dots.size(); ++i)
        dots[i].s = std::max(dots[i].s, dots[i - 1].s);
    return Reparameterization(std::move(dots));
}

} // namespace pbam
