#include "pbam/defects.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pbam/errors.hpp"
#include "pbam/parallel.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

double defect_star(const AsymptoticFamily& f, const Element& a, double t, int n)
{
    return (f(a, t).adjoint() - f(a.adjoint(), t)).seminorm(n);
}

double defect_scalar(const AsymptoticFamily& f, const Element& a, Complex lambda, double t, int n)
{
    return (lambda * f(a, t) - f(lambda * a, t)).seminorm(n);
}

double defect_add(const AsymptoticFamily& f, const Element& a, const Element& b, double t, int n)
{
    return (f(a, t) + f(b, t) - f(a + b, t)).seminorm(n);
}

double defect_mul(const AsymptoticFamily& f, const Element& a, const Element& b, double t, int n)
{
    return (f(a, t) * f(b, t) - f(a * b, t)).seminorm(n);
}

void SamplingGrid::validate() const
{
    if (t_values.empty())
        throw Error("sampling grid: empty t-grid");
    for (std::size_t i = 1; i < t_values.size(); ++i)
        if (!(t_values[i] > t_values[i - 1]))
            throw Error("sampling grid: t-values must be strictly increasing");
    if (!element_ids.empty() && element_ids.size() != test_elements.size())
        throw Error("sampling grid: element id count mismatch");
}

std::string SamplingGrid::element_id(std::size_t i) const
{
    if (i < element_ids.size())
        return element_ids[i];
    return "e" + std::to_string(i);
}

std::vector<double> uniform_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || stop < start)
        throw Error("uniform_grid: need step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = start + static_cast<double>(i) * step;
    return out;
}

std::vector<double> boundedness_profile(const AsymptoticFamily& f, const Element& a, const SamplingGrid& grid)
{
    std::vector<double> sup(grid.levels.size(), 0.0);
    for (double t : grid.t_values) {
        const auto norms = f.codomain()->seminorms(f(a, t).payload());
        for (std::size_t k = 0; k < grid.levels.size(); ++k)
            sup[k] = std::max(sup[k], norms.at(static_cast<std::size_t>(grid.levels[k])));
    }
    return sup;
}

ModulusEntry sac_modulus_estimate(const AsymptoticFamily& f, const Element& x, double eps,
                                  const std::vector<double>& t_values, const ModulusOptions& options,
                                  const std::string& element_id)
{
    ModulusEntry entry;
    entry.element_id = element_id;
    entry.epsilon = eps;
    if (t_values.empty()) {
        entry.note = "empty t-grid";
        return entry;
    }
    std::mt19937_64 rng(options.seed);
    std::vector<Element> base;
    base.reserve(t_values.size());
    for (double t : t_values)
        base.push_back(f(x, t));

    double eta = eps;
    for (int k = 0; k < options.ladder_steps; ++k, eta *= 0.5) {
        // last_bad[j]: largest grid index where some probe violates the bound.
        long last_bad = -1;
        for (int d = 0; d < options.directions; ++d) {
            const Element dir = f.domain()->make(f.domain()->random(rng, 1.0));
            for (double frac : {0.5, 0.9}) {
                const Element probe = point_at_distance(x, dir, frac * eta);
                for (std::size_t j = t_values.size(); j-- > 0;) {
                    if (static_cast<long>(j) <= last_bad)
                        break;
                    if (!(canonical_distance(base[j], f(probe, t_values[j])) < eps)) {
                        last_bad = static_cast<long>(j);
                        break;
                    }
                }
            }
        }
        if (last_bad + 1 < static_cast<long>(t_values.size())) {
            entry.found = true;
            entry.eta = eta;
            entry.p = t_values[static_cast<std::size_t>(last_bad + 1)];
            return entry;
        }
    }
    entry.note = "modulus not found within ladder budget";
    return entry;
}

ConditionSummary summarize_curve(const std::string& name, const std::vector<double>& values, double tol,
                                 double decay_factor)
{
    ConditionSummary s;
    s.name = name;
    if (values.empty())
        return s;
    const std::size_t q = (values.size() + 3) / 4;
    for (std::size_t i = 0; i < q; ++i)
        s.head_max = std::max(s.head_max, values[i]);
    for (std::size_t i = values.size() - q; i < values.size(); ++i)
        s.tail_max = std::max(s.tail_max, values[i]);
    s.decaying = s.head_max > 0.0 && s.tail_max <= decay_factor * s.head_max;
    s.pass = std::isfinite(s.tail_max) && (s.tail_max <= tol || s.decaying);
    return s;
}

const ConditionSummary& DefectReport::condition(const std::string& name) const
{
    for (const auto& c : conditions)
        if (c.name == name)
            return c;
    throw Error("defect report has no condition " + name);
}

DefectReport pbam_check(const AsymptoticFamily& f, const SamplingGrid& grid, const PbamTolerances& tol, int jobs)
{
    grid.validate();
    DefectReport report;
    report.family_id = f.id();
    const std::size_t m = grid.test_elements.size();
    const std::size_t nt = grid.t_values.size();
    const AlgebraPtr& cod = f.codomain();
    for (int level : grid.levels)
        if (level < 0 || level >= cod->levels())
            throw LevelOutOfRange("pbam_check: level " + std::to_string(level) + " not exposed by " + cod->id());

    std::vector<std::vector<DefectRow>> slots(m * nt);
    parallel_for(m * nt, jobs, [&](std::size_t idx) {
        const std::size_t i = idx / nt;
        const std::size_t j = idx % nt;
        const double t = grid.t_values[j];
        const Element& a = grid.test_elements[i];
        const Element& b = grid.test_elements[(i + 1) % m];
        const Element fa = f(a, t);
        const Element fb = f(b, t);
        const auto star = cod->seminorms((fa.adjoint() - f(a.adjoint(), t)).payload());
        const auto scalar = cod->seminorms((tol.lambda * fa - f(tol.lambda * a, t)).payload());
        const auto add = cod->seminorms((fa + fb - f(a + b, t)).payload());
        const auto mul = cod->seminorms((fa * fb - f(a * b, t)).payload());
        const auto bound = cod->seminorms(fa.payload());
        auto& rows = slots[idx];
        for (int level : grid.levels) {
            const auto n = static_cast<std::size_t>(level);
            rows.push_back({f.id(), grid.element_id(i), t, level, star[n], scalar[n], add[n], mul[n], bound[n]});
        }
    });

    std::vector<double> star_curve(nt, 0.0), scalar_curve(nt, 0.0), add_curve(nt, 0.0), mul_curve(nt, 0.0);
    report.profiles.assign(m, std::vector<double>(grid.levels.size(), 0.0));
    report.bounded.assign(m, true);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> head(grid.levels.size(), 0.0), tail(grid.levels.size(), 0.0);
        const std::size_t q = (nt + 3) / 4;
        for (std::size_t j = 0; j < nt; ++j) {
            const auto& rows = slots[i * nt + j];
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const auto& r = rows[k];
                star_curve[j] = std::max(star_curve[j], r.star);
                scalar_curve[j] = std::max(scalar_curve[j], r.scalar);
                add_curve[j] = std::max(add_curve[j], r.add);
                mul_curve[j] = std::max(mul_curve[j], r.mul);
                report.profiles[i][k] = std::max(report.profiles[i][k], r.bound);
                if (j + q >= nt && nt >= 4)
                    tail[k] = std::max(tail[k], r.bound);
                else
                    head[k] = std::max(head[k], r.bound);
                if (!std::isfinite(r.bound))
                    report.bounded[i] = false;
            }
            report.rows.insert(report.rows.end(), rows.begin(), rows.end());
        }
        for (std::size_t k = 0; k < grid.levels.size(); ++k)
            if (tail[k] > tol.growth_factor * head[k] + tol.defect_tol)
                report.bounded[i] = false;
    }

    std::vector<double> zero_curve(nt, 0.0);
    const Element zero = f.domain()->zero();
    for (std::size_t j = 0; j < nt; ++j) {
        const auto norms = cod->seminorms(f(zero, grid.t_values[j]).payload());
        for (int level : grid.levels)
            zero_curve[j] = std::max(zero_curve[j], norms[static_cast<std::size_t>(level)]);
        report.zero_image_max = std::max(report.zero_image_max, zero_curve[j]);
    }

    report.conditions = {summarize_curve("star", star_curve, tol.defect_tol, tol.decay_factor),
                         summarize_curve("scalar", scalar_curve, tol.defect_tol, tol.decay_factor),
                         summarize_curve("add", add_curve, tol.defect_tol, tol.decay_factor),
                         summarize_curve("mul", mul_curve, tol.defect_tol, tol.decay_factor),
                         summarize_curve("zero", zero_curve, tol.defect_tol, tol.decay_factor)};

    report.moduli.resize(m);
    parallel_for(m, jobs, [&](std::size_t i) {
        ModulusOptions opts = tol.modulus;
        opts.seed = tol.modulus.seed + i;
        report.moduli[i] = sac_modulus_estimate(f, grid.test_elements[i], tol.modulus_eps, grid.t_values, opts,
                                                grid.element_id(i));
    });

    report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                              [](const ConditionSummary& c) { return c.pass; }) &&
                  std::all_of(report.bounded.begin(), report.bounded.end(), [](bool b) { return b; }) &&
                  std::all_of(report.moduli.begin(), report.moduli.end(),
                              [](const ModulusEntry& e) { return e.found; });
    return report;
}

} // namespace pbam
