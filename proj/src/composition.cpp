#include "pbam/composition.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pbam/errors.hpp"
#include "pbam/parallel.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

CompositeFamily::CompositeFamily(std::string id, FamilyPtr f, FamilyPtr g, Reparameterization phi)
    : AsymptoticFamily(std::move(id), f ? f->domain() : nullptr, g ? g->codomain() : nullptr),
      f_(std::move(f)), g_(std::move(g)), phi_(std::move(phi))
{
}

Element CompositeFamily::eval(const Element& a, double t) const { return (*g_)((*f_)(a, t), phi_(t)); }

CompositePtr compose_with(FamilyPtr f, FamilyPtr g, Reparameterization phi, std::string id)
{
    if (!f || !g)
        throw AlgebraMismatch("compose_with: missing family");
    if (f->codomain()->id() != g->domain()->id())
        throw AlgebraMismatch("compose_with: " + f->id() + " maps into " + f->codomain()->id() + " but " + g->id() +
                              " is defined on " + g->domain()->id());
    if (id.empty())
        id = g->id() + "o" + f->id();
    return std::make_shared<CompositeFamily>(std::move(id), std::move(f), std::move(g), std::move(phi));
}

HomotopyPtr reparam_blend(const FamilyPtr& f, const FamilyPtr& g, const Reparameterization& phi,
                          const Reparameterization& theta, AlgebraPtr path)
{
    auto at_phi = compose_with(f, g, phi, g->id() + "o[phi]" + f->id());
    auto at_theta = compose_with(f, g, theta, g->id() + "o[theta]" + f->id());
    BlendFn fn = [f, g, phi, theta](const Element& a, double t, double p) {
        return (*g)((*f)(a, t), p * phi(t) + (1.0 - p) * theta(t));
    };
    return homotopy_family(at_theta, at_phi, std::move(path), std::move(fn),
                           "reparam_blend(" + g->id() + "o" + f->id() + ")");
}

// -------------------------------------------------------------------- C1

namespace {

// Largest s-index whose sampled bound fails, or -1.
template <class Pred>
long last_failure(const std::vector<double>& s_values, Pred ok_at)
{
    for (std::size_t k = s_values.size(); k-- > 0;)
        if (!ok_at(s_values[k]))
            return static_cast<long>(k);
    return -1;
}

// Smallest index q such that every entry at or after q is set.
std::optional<std::size_t> first_suffix_start(const std::vector<std::optional<double>>& xs)
{
    std::size_t q = xs.size();
    for (std::size_t j = xs.size(); j-- > 0;) {
        if (!xs[j])
            break;
        q = j;
    }
    if (q == xs.size())
        return std::nullopt;
    return q;
}

} // namespace

C1Entry check_C1(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a, double nu,
                 const CompositionGrids& grids, const ProbeOptions& options)
{
    C1Entry entry;
    entry.nu = nu;
    std::mt19937_64 rng(options.seed);
    const auto& ts = grids.t_values;
    const auto& ss = grids.s_values;
    std::vector<Element> images;
    for (double t : ts)
        images.push_back(f(a, t));

    double xi = nu;
    for (int k = 0; k < options.ladder_steps; ++k, xi *= 0.5) {
        std::vector<std::optional<double>> s_prime(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const Element& x = images[j];
            std::vector<Element> probes;
            for (int d = 0; d < options.directions; ++d) {
                const Element dir_b = f.codomain()->make(f.codomain()->random(rng, 1.0));
                const Element dir_a = f.domain()->make(f.domain()->random(rng, 1.0));
                for (double frac : {0.5, 0.9}) {
                    probes.push_back(point_at_distance(x, dir_b, frac * xi));
                    Element b = f(point_at_distance(a, dir_a, frac * xi), ts[j]);
                    if (canonical_distance(x, b) < xi)
                        probes.push_back(std::move(b));
                }
            }
            const long bad = last_failure(ss, [&](double s) {
                const Element gx = g(x, s);
                for (const auto& b : probes)
                    if (!(canonical_distance(gx, g(b, s)) < nu))
                        return false;
                return true;
            });
            if (bad + 1 < static_cast<long>(ss.size()))
                s_prime[j] = ss[static_cast<std::size_t>(bad + 1)];
        }
        if (const auto q = first_suffix_start(s_prime)) {
            entry.found = true;
            entry.xi = xi;
            entry.q_prime = ts[*q];
            for (std::size_t j = *q; j < ts.size(); ++j)
                entry.s_prime.push_back({ts[j], *s_prime[j]});
            return entry;
        }
    }
    entry.note = "no xi found within the ladder budget";
    return entry;
}

// -------------------------------------------------------------------- C3

C3Entry check_C3(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a, int n,
                 const CompositionGrids& grids)
{
    C3Entry entry;
    entry.level = n;
    const auto& ts = grids.t_values;
    const auto& ss = grids.s_values;
    if (n < 0 || n >= g.codomain()->levels())
        throw LevelOutOfRange("check_C3: level " + std::to_string(n));
    std::vector<std::vector<double>> values(ts.size(), std::vector<double>(ss.size()));
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const Element x = f(a, ts[j]);
        for (std::size_t k = 0; k < ss.size(); ++k) {
            values[j][k] = g(x, ss[k]).seminorm(n);
            entry.observed_max = std::max(entry.observed_max, values[j][k]);
        }
    }
    double m = 0.0;
    for (std::size_t j = ts.size() / 2; j < ts.size(); ++j)
        for (std::size_t k = ss.size() / 2; k < ss.size(); ++k)
            m = std::max(m, values[j][k]);
    if (!std::isfinite(m)) {
        entry.note = "non-finite composite values";
        return entry;
    }
    entry.m = m;
    const double cap = m * (1.0 + 1e-12) + 1e-300;
    std::vector<std::optional<double>> s_n(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) {
        long bad = -1;
        for (std::size_t k = ss.size(); k-- > 0;)
            if (values[j][k] > cap) {
                bad = static_cast<long>(k);
                break;
            }
        if (bad + 1 < static_cast<long>(ss.size()))
            s_n[j] = ss[static_cast<std::size_t>(bad + 1)];
    }
    if (const auto q = first_suffix_start(s_n)) {
        entry.found = true;
        entry.q = ts[*q];
        for (std::size_t j = *q; j < ts.size(); ++j)
            entry.s_n.push_back({ts[j], *s_n[j]});
    } else {
        entry.note = "values exceed the tail bound at the horizon";
    }
    return entry;
}

bool C1C3Certificate::complete() const
{
    for (const auto& e : c1)
        if (!e.found)
            return false;
    for (const auto& row : c3)
        for (const auto& e : row)
            if (!e.found)
                return false;
    return true;
}

C1C3Certificate certify_C1C3(const AsymptoticFamily& f, const AsymptoticFamily& g, const SamplingGrid& elements,
                             double nu, const CompositionGrids& grids, const ProbeOptions& options, int jobs)
{
    C1C3Certificate cert;
    const std::size_t m = elements.test_elements.size();
    cert.c1.resize(m);
    cert.c3.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        cert.element_ids.push_back(elements.element_id(i));
    parallel_for(m, jobs, [&](std::size_t i) {
        ProbeOptions opts = options;
        opts.seed = options.seed + i;
        cert.c1[i] = check_C1(f, g, elements.test_elements[i], nu, grids, opts);
        for (int level : elements.levels)
            cert.c3[i].push_back(check_C3(f, g, elements.test_elements[i], level, grids));
    });
    return cert;
}

// -------------------------------------------------------- reparam search

ReparamSearch search_reparam(const FamilyPtr& f, const FamilyPtr& g, const SamplingGrid& elements,
                             const CompositionGrids& grids, const TolSchedule& tol,
                             const C1C3Certificate& certificate, const PbamTolerances& pbam_tol, int p_points,
                             int jobs)
{
    ReparamSearch out;
    elements.validate();
    const auto& ts = grids.t_values;
    const auto& ss = grids.s_values;
    const std::size_t m = elements.test_elements.size();
    if (f->codomain()->id() != g->domain()->id())
        throw AlgebraMismatch("search_reparam: " + f->id() + " and " + g->id() + " do not compose");
    if (certificate.c3.size() != m)
        throw Error("search_reparam: certificate does not match the test elements");

    std::vector<std::optional<double>> minimal(ts.size());
    std::vector<std::string> witnesses(ts.size());
    const AlgebraPtr& cod = g->codomain();
    const Complex lambda = pbam_tol.lambda;

    parallel_for(ts.size(), jobs, [&](std::size_t j) {
        const double t = ts[j];
        const double bound = tol(t);
        struct Images {
            Element x, xs, lx, sum, prod, next;
        };
        std::vector<Images> images;
        for (std::size_t i = 0; i < m; ++i) {
            const Element x = (*f)(elements.test_elements[i], t);
            const Element y = (*f)(elements.test_elements[(i + 1) % m], t);
            images.push_back({x, x.adjoint(), lambda * x, x + y, x * y, y});
        }
        std::string why;
        const long bad = last_failure(ss, [&](double s) {
            for (std::size_t i = 0; i < m; ++i) {
                const auto& im = images[i];
                const Element gx = (*g)(im.x, s);
                const Element gy = (*g)(im.next, s);
                const auto star = cod->seminorms((gx.adjoint() - (*g)(im.xs, s)).payload());
                const auto scal = cod->seminorms((lambda * gx - (*g)(im.lx, s)).payload());
                const auto add = cod->seminorms((gx + gy - (*g)(im.sum, s)).payload());
                const auto mul = cod->seminorms((gx * gy - (*g)(im.prod, s)).payload());
                const auto norm = cod->seminorms(gx.payload());
                for (std::size_t li = 0; li < elements.levels.size(); ++li) {
                    const auto n = static_cast<std::size_t>(elements.levels[li]);
                    const double worst = std::max({star[n], scal[n], add[n], mul[n]});
                    if (!(worst <= bound)) {
                        why = elements.element_id(i) + " level " + std::to_string(n) + " defect " +
                              std::to_string(worst) + " > " + std::to_string(bound);
                        return false;
                    }
                    const auto& c3 = certificate.c3[i];
                    if (li < c3.size() && c3[li].found && t >= c3[li].q && norm[n] > c3[li].m + 1.0) {
                        why = elements.element_id(i) + " level " + std::to_string(n) + " exceeds C3 bound";
                        return false;
                    }
                }
            }
            return true;
        });
        if (bad + 1 < static_cast<long>(ss.size()))
            minimal[j] = ss[static_cast<std::size_t>(bad + 1)];
        else
            witnesses[j] = "t = " + std::to_string(t) + ", s = " + std::to_string(ss.back()) + ": " + why;
    });

    for (std::size_t j = 0; j < ts.size(); ++j) {
        if (!minimal[j]) {
            out.witness = "no admissible s within the horizon at " + witnesses[j];
            return out;
        }
        out.constraints.push_back({ts[j], *minimal[j]});
    }
    out.success = true;
    out.phi = join_dots_phi(out.constraints);

    out.theta_shift = ss.size() > 1 ? ss[1] - ss[0] : 1.0;
    const Reparameterization theta = out.phi.shifted(out.theta_shift);
    const auto at_phi = compose_with(f, g, out.phi);
    const auto at_theta = compose_with(f, g, theta);
    SamplingGrid grid = elements;
    grid.t_values = ts;
    out.phi_report = pbam_check(*at_phi, grid, pbam_tol, jobs);
    out.theta_report = pbam_check(*at_theta, grid, pbam_tol, jobs);
    out.phi_pbam = out.phi_report->pass;
    out.theta_pbam = out.theta_report->pass;

    const auto blend = reparam_blend(f, g, out.phi, theta, path_algebra(cod, std::max(p_points, 2)));
    const auto* path = as_path(*blend->codomain());
    out.blend_endpoints = true;
    for (std::size_t i = 0; i < m && out.blend_endpoints; ++i)
        for (double t : ts) {
            const Element& a = elements.test_elements[i];
            const Element h = (*blend)(a, t);
            if (!path->sample(h, 0).same_payload((*at_theta)(a, t)) ||
                !path->sample(h, path->points() - 1).same_payload((*at_phi)(a, t))) {
                out.blend_endpoints = false;
                break;
            }
        }
    return out;
}

// ------------------------------------------------------------- r-map

Element hat_f(const AsymptoticFamily& f, const Element& u, double t, double p, const SqrtDomain& v_b)
{
    const Element x = f(u, t);
    const Element xs = x.adjoint();
    const Element left = quasi_product(xs, x);
    if (!in_domain(left, v_b))
        throw DomainViolation("f_t(u)*.f_t(u) not in V_B at t = " + std::to_string(t));
    if (!in_domain(quasi_product(x, xs), v_b))
        throw DomainViolation("f_t(u).f_t(u)* not in V_B at t = " + std::to_string(t));
    return quasi_product(x, theta(p * left, v_b));
}

Element retract_image(const AsymptoticFamily& g, const Element& x, double s, const SqrtDomain& v_c)
{
    const Element y = g(x, s);
    const Element ys = y.adjoint();
    const Element left = quasi_product(ys, y);
    if (!in_domain(left, v_c))
        throw DomainViolation("g_s(x)*.g_s(x) not in V_C at s = " + std::to_string(s));
    if (!in_domain(quasi_product(y, ys), v_c))
        throw DomainViolation("g_s(x).g_s(x)* not in V_C at s = " + std::to_string(s));
    return quasi_product(y, theta(left, v_c));
}

Element r_map(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& u, double s, double t,
              double p, const SqrtDomain& v_b, const SqrtDomain& v_c)
{
    return retract_image(g, hat_f(f, u, t, p, v_b), s, v_c);
}

} // namespace pbam
