#include "pbam/unitary_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbam/errors.hpp"
#include "pbam/parallel.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

QuasiUnitaryNet make_net(std::vector<Element> points, double tol, std::vector<std::string> ids)
{
    QuasiUnitaryNet net;
    net.tolerance = tol;
    if (ids.empty())
        for (std::size_t i = 0; i < points.size(); ++i)
            ids.push_back("u" + std::to_string(i));
    if (ids.size() != points.size())
        throw Error("make_net: id count mismatch");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto check = is_quasi_unitary(points[i], tol);
        if (!check.ok)
            throw Error("make_net: point " + ids[i] + " has quasi-unitary defect " + std::to_string(check.defect));
    }
    const auto n = static_cast<Eigen::Index>(points.size());
    net.distances = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = canonical_distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
            net.distances(i, j) = d;
            net.distances(j, i) = d;
        }
    net.points = std::move(points);
    net.ids = std::move(ids);
    return net;
}

QuasiUnitaryNet random_net(const AlgebraPtr& algebra, const NetSpec& spec, std::mt19937_64& rng)
{
    std::vector<Element> points;
    const auto* mat = as_matrix(*algebra);
    if (spec.block > 0) {
        if (!mat || spec.block > mat->size())
            throw Error("random_net: block support needs a matrix algebra of size >= block");
        // Generate in M_block, then embed in the top-left corner so the
        // support is exact.
        const AlgebraPtr small = matrix_algebra(spec.block, algebra->levels(), "block");
        const SqrtDomain v = default_domain(small);
        for (int i = 0; i < spec.count; ++i) {
            const Element u = small->make(small->random_quasi_unitary(rng));
            const Element x = u + small->make(small->random(rng, spec.perturbation));
            const Element r = quasi_polar(x, v);
            Matrix big = Matrix::Zero(mat->size(), mat->size());
            big.topLeftCorner(spec.block, spec.block) = r.payload()[0];
            points.push_back(mat->from_matrix(big));
        }
    } else {
        const SqrtDomain v = default_domain(algebra);
        for (int i = 0; i < spec.count; ++i) {
            const Element u = algebra->make(algebra->random_quasi_unitary(rng));
            const Element x = u + algebra->make(algebra->random(rng, spec.perturbation));
            points.push_back(quasi_polar(x, v));
        }
    }
    return make_net(std::move(points), spec.tolerance);
}

namespace {

bool retraction_defined(const AsymptoticFamily& f, const Element& u, double t, const SqrtDomain& v)
{
    return quasi_polar_defined(f(u, t), v);
}

} // namespace

double scan_threshold(const AsymptoticFamily& f, const Element& u, const SqrtDomain& v,
                      const std::vector<double>& t_values, int refine)
{
    if (t_values.empty())
        throw ThresholdNotFound("scan_threshold: empty grid");
    std::size_t first_good = t_values.size();
    for (std::size_t j = t_values.size(); j-- > 0;) {
        bool ok = retraction_defined(f, u, t_values[j], v);
        if (ok && j + 1 < t_values.size()) {
            const double h = t_values[j + 1] - t_values[j];
            for (int k = 1; ok && k < refine; ++k)
                ok = retraction_defined(f, u, t_values[j] + h * k / refine, v);
        }
        if (!ok)
            break;
        first_good = j;
    }
    if (first_good == t_values.size())
        throw ThresholdNotFound("family " + f.id() + ": retraction undefined at the horizon t = " +
                                std::to_string(t_values.back()));
    return t_values[first_good];
}

AlphaFunction::AlphaFunction(QuasiUnitaryNet net, std::vector<double> values, double radius,
                             std::vector<double> thresholds)
    : net_(std::move(net)), values_(std::move(values)), thresholds_(std::move(thresholds)), radius_(radius)
{
    if (values_.size() != net_.size())
        throw Error("alpha function: one value per net point required");
    for (double v : values_)
        if (!(v >= 0.0))
            throw Error("alpha function values must be non-negative");
}

double AlphaFunction::operator()(const Element& v) const
{
    if (net_.points.empty())
        throw Error("alpha function on an empty net");
    double best = -1.0;
    double nearest = std::numeric_limits<double>::infinity();
    double nearest_value = 0.0;
    for (std::size_t i = 0; i < net_.size(); ++i) {
        const double d = canonical_distance(v, net_.points[i]);
        if (d <= radius_)
            best = std::max(best, values_[i]);
        if (d < nearest) {
            nearest = d;
            nearest_value = values_[i];
        }
    }
    return best >= 0.0 ? best : nearest_value;
}

AlphaFunction AlphaFunction::pointwise_max(const std::vector<const AlphaFunction*>& parts)
{
    if (parts.empty())
        throw Error("pointwise_max of no alpha functions");
    const AlphaFunction& first = *parts.front();
    std::vector<double> values = first.values_;
    double radius = first.radius_;
    for (const auto* p : parts) {
        if (p->net_.size() != first.net_.size())
            throw Error("pointwise_max: alpha functions live on different nets");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!p->net_.points[i].same_payload(first.net_.points[i]))
                throw Error("pointwise_max: alpha functions live on different nets");
            values[i] = std::max(values[i], p->values_[i]);
        }
        radius = std::min(radius, p->radius_);
    }
    return AlphaFunction(first.net_, std::move(values), radius);
}

AlphaFunction build_alpha(const AsymptoticFamily& f, const QuasiUnitaryNet& net, const SqrtDomain& v,
                          const std::vector<double>& t_values, double radius, int jobs, int refine)
{
    std::vector<double> thresholds(net.size());
    parallel_for(net.size(), jobs, [&](std::size_t i) {
        thresholds[i] = scan_threshold(f, net.points[i], v, t_values, refine);
    });
    std::vector<double> values(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto it = std::lower_bound(t_values.begin(), t_values.end(), thresholds[i]);
        const auto j = static_cast<std::size_t>(it - t_values.begin());
        double step = 0.0;
        if (j + 1 < t_values.size())
            step = t_values[j + 1] - t_values[j];
        else if (t_values.size() > 1)
            step = t_values.back() - t_values[t_values.size() - 2];
        values[i] = thresholds[i] + step;
    }
    return AlphaFunction(net, std::move(values), radius, std::move(thresholds));
}

Element retract_at(const AsymptoticFamily& f, const Element& v, double t, const SqrtDomain& dom)
{
    try {
        return quasi_polar(f(v, t), dom);
    } catch (const DomainViolation& e) {
        throw DomainViolation("retraction of " + f.id() + " at t = " + std::to_string(t) +
                              " undefined (alpha insufficient?): " + e.what());
    }
}

Element retract_representative(const AsymptoticFamily& f, const AlphaFunction& alpha, const Element& v,
                               const SqrtDomain& dom)
{
    return retract_at(f, v, alpha(v), dom);
}

Element alpha_homotopy(const AsymptoticFamily& f, const AlphaFunction& alpha, const AlphaFunction& gamma,
                       const Element& v, double p, const SqrtDomain& dom)
{
    const double a = alpha(v);
    const double g = gamma(v);
    if (g < a)
        throw InvalidHomotopy("alpha_homotopy: gamma(v) = " + std::to_string(g) + " < alpha(v) = " +
                              std::to_string(a));
    return retract_at(f, v, p * a + (1.0 - p) * g, dom);
}

HomotopySweep alpha_homotopy_sweep(const AsymptoticFamily& f, const AlphaFunction& alpha,
                                   const AlphaFunction& gamma, const std::vector<double>& p_values,
                                   const SqrtDomain& dom)
{
    HomotopySweep sweep;
    const auto& net = alpha.net();
    for (std::size_t i = 0; i < net.size(); ++i) {
        const Element& v = net.points[i];
        try {
            for (double p : p_values) {
                const Element h = alpha_homotopy(f, alpha, gamma, v, p, dom);
                const double defect = is_quasi_unitary(h, 0.0).defect;
                sweep.rows.push_back({net.ids[i], p, defect});
                sweep.max_defect = std::max(sweep.max_defect, defect);
                if (p == 0.0 && !h.same_payload(retract_representative(f, gamma, v, dom)))
                    sweep.endpoints_exact = false;
                if (p == 1.0 && !h.same_payload(retract_representative(f, alpha, v, dom)))
                    sweep.endpoints_exact = false;
            }
        } catch (const Error& e) {
            sweep.broken = true;
            sweep.witness = net.ids[i] + ": " + e.what();
            return sweep;
        }
    }
    return sweep;
}

PbaHomotopyReport pba_homotopy_check(const HomotopyFamily& h, const QuasiUnitaryNet& net,
                                     const std::vector<double>& t_values, const std::vector<double>& p_values,
                                     const SqrtDomain& v_b, double tol, double radius, int jobs)
{
    PbaHomotopyReport report;
    const auto* path = as_path(*h.codomain());
    const FamilyPtr& f = h.start();
    const FamilyPtr& g = h.end();

    for (std::size_t i = 0; i < net.size(); ++i)
        for (double t : t_values) {
            const Element ht = h(net.points[i], t);
            if (!path->sample(ht, 0).same_payload((*f)(net.points[i], t)) ||
                !path->sample(ht, path->points() - 1).same_payload((*g)(net.points[i], t)))
                throw InvalidHomotopy("endpoint mismatch for " + h.id() + " at " + net.ids[i] +
                                      ", t = " + std::to_string(t));
        }
    report.endpoints_ok = true;

    const SqrtDomain v_path = lift_domain(v_b, h.codomain());
    try {
        const AlphaFunction alpha = build_alpha(*f, net, v_b, t_values, radius, jobs);
        const AlphaFunction beta = build_alpha(*g, net, v_b, t_values, radius, jobs);
        const AlphaFunction gamma = build_alpha(h, net, v_path, t_values, radius, jobs);
        const AlphaFunction eta = AlphaFunction::pointwise_max({&alpha, &beta, &gamma});
        report.eta = eta.values();

        for (std::size_t i = 0; i < net.size(); ++i) {
            const Element& u = net.points[i];
            const double t = eta(u);
            const Element big = retract_at(h, u, t, v_path);
            for (int k = 0; k < path->points(); ++k) {
                const double defect = is_quasi_unitary(path->sample(big, k), 0.0).defect;
                report.path_sweep.rows.push_back({net.ids[i], path->p_value(k), defect});
                report.path_sweep.max_defect = std::max(report.path_sweep.max_defect, defect);
            }
            const Element f_eta = retract_at(*f, u, t, v_b);
            const Element g_eta = retract_at(*g, u, t, v_b);
            report.endpoint_gap = std::max({report.endpoint_gap, (path->sample(big, 0) - f_eta).top_seminorm(),
                                            (path->sample(big, path->points() - 1) - g_eta).top_seminorm()});
        }
        report.start_sweep = alpha_homotopy_sweep(*f, alpha, eta, p_values, v_b);
        report.end_sweep = alpha_homotopy_sweep(*g, beta, eta, p_values, v_b);
    } catch (const Error& e) {
        report.failure = e.what();
        return report;
    }

    const auto sweep_ok = [&](const HomotopySweep& s) { return !s.broken && s.max_defect <= tol; };
    report.pass = sweep_ok(report.path_sweep) && sweep_ok(report.start_sweep) && sweep_ok(report.end_sweep) &&
                  report.endpoint_gap <= tol;
    if (!report.pass) {
        if (report.start_sweep.broken)
            report.failure = "start homotopy broken: " + report.start_sweep.witness;
        else if (report.end_sweep.broken)
            report.failure = "end homotopy broken: " + report.end_sweep.witness;
        else
            report.failure = "quasi-unitary defect above tolerance";
    }
    return report;
}

} // namespace pbam
