#include <algorithm>
#include <optional>

#include "pbam/composition.hpp"
#include "pbam/errors.hpp"
#include "pbam/parallel.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

namespace {

double max_abs_gap(const Element& a, const Element& b) { return (a - b).top_seminorm(); }

struct DomainScan {
    std::vector<std::optional<double>> gamma;          // per net point
    std::vector<std::vector<std::optional<double>>> s; // per point, per t: minimal s for r_map
};

// For each u and grid t: is hat f defined, and from which grid s on does
// the image retract in C for every p of the sweep grid.
DomainScan scan_r_domain(const AsymptoticFamily& f, const AsymptoticFamily& g, const QuasiUnitaryNet& net,
                         const CompositionGrids& grids, const SqrtDomain& v_b, const SqrtDomain& v_c,
                         const std::vector<double>& p_values, int refine, int jobs)
{
    const auto& ts = grids.t_values;
    const auto& ss = grids.s_values;
    DomainScan scan;
    scan.gamma.resize(net.size());
    scan.s.assign(net.size(), std::vector<std::optional<double>>(ts.size()));
    parallel_for(net.size(), jobs, [&](std::size_t i) {
        const Element& u = net.points[i];
        std::optional<std::size_t> suffix;
        for (std::size_t j = ts.size(); j-- > 0;) {
            const int t_sub = j + 1 < ts.size() ? refine : 1;
            std::vector<Element> hats;
            try {
                for (double p : p_values)
                    hats.push_back(hat_f(f, u, ts[j], p, v_b));
                // Off-grid t is only reached with p = 1.
                for (int q = 1; q < t_sub; ++q)
                    hats.push_back(hat_f(f, u, ts[j] + (ts[j + 1] - ts[j]) * q / refine, 1.0, v_b));
            } catch (const DomainViolation&) {
                break;
            }
            long bad = -1;
            for (std::size_t k = ss.size(); k-- > 0 && bad < 0;) {
                const int s_sub = k + 1 < ss.size() ? refine : 1;
                for (int q = 0; q < s_sub && bad < 0; ++q) {
                    const double s = q == 0 ? ss[k] : ss[k] + (ss[k + 1] - ss[k]) * q / refine;
                    for (const auto& x : hats)
                        if (!quasi_polar_defined(g(x, s), v_c)) {
                            bad = static_cast<long>(k);
                            break;
                        }
                }
            }
            if (bad + 1 >= static_cast<long>(ss.size()))
                break;
            scan.s[i][j] = ss[static_cast<std::size_t>(bad + 1)];
            suffix = j;
        }
        if (suffix)
            scan.gamma[i] = ts[*suffix];
    });
    return scan;
}

} // namespace

FunctorialityReport functoriality_check(const FamilyPtr& f, const FamilyPtr& g, const Reparameterization& phi,
                                        const QuasiUnitaryNet& net, const CompositionGrids& grids,
                                        const SqrtDomain& v_b, const SqrtDomain& v_c,
                                        const FunctorialityOptions& options)
{
    FunctorialityReport report;
    const auto& ts = grids.t_values;
    if (f->codomain()->id() != g->domain()->id())
        throw AlgebraMismatch("functoriality_check: " + f->id() + " and " + g->id() + " do not compose");
    if (ts.empty() || grids.s_values.empty())
        throw ConfigError("functoriality_check: empty grids");
    std::vector<double> p_values = options.p_values;
    if (p_values.empty())
        for (int k = 0; k <= 10; ++k)
            p_values.push_back(k / 10.0);
    const std::size_t m = net.size();

    // gamma and the s-threshold theta of the r-map.
    const DomainScan scan = scan_r_domain(*f, *g, net, grids, v_b, v_c, p_values, options.refine, options.jobs);
    report.gamma.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!scan.gamma[i]) {
            report.failure = "r_map undefined near the horizon for " + net.ids[i];
            return report;
        }
        report.gamma[i] = *scan.gamma[i];
    }
    std::vector<double> needed(ts.size(), grids.s_values.front());
    for (std::size_t j = 0; j < ts.size(); ++j)
        for (std::size_t i = 0; i < m; ++i)
            if (report.gamma[i] <= ts[j] && scan.s[i][j])
                needed[j] = std::max(needed[j], *scan.s[i][j]);
    std::vector<Dot> dots;
    for (std::size_t j = 0; j < ts.size(); ++j) {
        const double next = j + 1 < ts.size() ? needed[j + 1] : needed[j];
        dots.push_back({ts[j], std::max(needed[j], next)});
    }
    report.theta = join_dots_phi(dots);
    report.psi = pointwise_max({Reparameterization::identity(), phi, report.theta});

    const auto composite = compose_with(f, g, report.psi);
    AlphaFunction alpha, mu, beta;
    std::vector<Element> images(m);
    try {
        alpha = build_alpha(*f, net, v_b, ts, options.alpha_radius, options.jobs, options.refine);
        mu = build_alpha(*composite, net, v_c, ts, options.alpha_radius, options.jobs, options.refine);
        report.alpha = alpha.values();
        report.mu = mu.values();
        report.lambda.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            report.lambda[i] = std::max(report.alpha[i], report.gamma[i]);
            images[i] = hat_f(*f, net.points[i], report.lambda[i], 1.0, v_b);
        }
        std::vector<std::string> image_ids;
        for (const auto& id : net.ids)
            image_ids.push_back("f(" + id + ")");
        const QuasiUnitaryNet image_net = make_net(images, options.quasi_unitary_tol, image_ids);
        beta = build_alpha(*g, image_net, v_c, grids.s_values, options.alpha_radius, options.jobs,
                           options.refine);
    } catch (const Error& e) {
        report.failure = e.what();
        return report;
    }
    report.beta_at_image.resize(m);
    report.omega.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        report.beta_at_image[i] = beta(images[i]);
        report.omega[i] =
            std::max({report.alpha[i], report.beta_at_image[i], report.gamma[i], report.mu[i]});
    }

    // Sweeps. Each net point fills its own slot; rows are merged in order.
    struct PointResult {
        std::vector<FunctorialityRow> rows;
        StageResult stage[3];
        bool j01 = false, j12 = false;
        double start_gap = 0.0, end_gap = 0.0, mu_gap = 0.0;
        std::string error;
    };
    std::vector<PointResult> results(m);
    const char* names[3] = {"h", "h1", "h2"};
    const Reparameterization& psi = report.psi;

    parallel_for(m, options.jobs, [&](std::size_t i) {
        PointResult& res = results[i];
        for (int k = 0; k < 3; ++k)
            res.stage[k].name = names[k];
        const Element& u = net.points[i];
        const double om = report.omega[i];
        const double lam = report.lambda[i];
        const double be = report.beta_at_image[i];
        const Element& f_lam = images[i];
        auto tau = [&](double p) { return (1.0 - p) * om + p * lam; };
        auto zeta = [&](double p) { return std::max(psi(tau(p)), be); };
        auto h = [&](double p) { return retract_image(*g, hat_f(*f, u, om, p, v_b), psi(om), v_c); };
        auto h1 = [&](double p) { return retract_image(*g, hat_f(*f, u, tau(p), 1.0, v_b), zeta(p), v_c); };
        auto h2 = [&](double p) {
            const double z1 = zeta(1.0);
            return retract_image(*g, f_lam, (1.0 - p) * z1 + p * be, v_c);
        };
        std::function<Element(double)> stages[3] = {h, h1, h2};
        for (int k = 0; k < 3; ++k)
            for (double p : p_values) {
                try {
                    const double d = is_quasi_unitary(stages[k](p), options.quasi_unitary_tol).defect;
                    res.rows.push_back({net.ids[i], names[k], p, d});
                    res.stage[k].max_defect = std::max(res.stage[k].max_defect, d);
                    if (!(d <= options.quasi_unitary_tol) && res.stage[k].pass) {
                        res.stage[k].pass = false;
                        res.stage[k].witness = net.ids[i] + " p=" + std::to_string(p);
                    }
                } catch (const Error& e) {
                    if (res.stage[k].pass)
                        res.stage[k].witness = net.ids[i] + " p=" + std::to_string(p) + ": " + e.what();
                    res.stage[k].pass = false;
                }
            }
        try {
            res.j01 = h(1.0).same_payload(h1(0.0));
            res.j12 = h1(1.0).same_payload(h2(0.0));
            res.start_gap = max_abs_gap(h(0.0), retract_at(*composite, u, om, v_c));
            res.end_gap = max_abs_gap(h2(1.0), retract_at(*g, f_lam, be, v_c));
            res.mu_gap = max_abs_gap(retract_at(*composite, u, report.mu[i], v_c),
                                     retract_at(*composite, u, om, v_c));
        } catch (const Error& e) {
            res.error = net.ids[i] + ": " + e.what();
        }
    });

    report.junction_h_h1 = true;
    report.junction_h1_h2 = true;
    for (int k = 0; k < 3; ++k)
        report.stages.push_back({names[k], true, 0.0, {}});
    for (const auto& res : results) {
        report.rows.insert(report.rows.end(), res.rows.begin(), res.rows.end());
        for (int k = 0; k < 3; ++k) {
            auto& st = report.stages[k];
            st.max_defect = std::max(st.max_defect, res.stage[k].max_defect);
            if (!res.stage[k].pass && st.pass) {
                st.pass = false;
                st.witness = res.stage[k].witness;
            }
        }
        report.junction_h_h1 = report.junction_h_h1 && res.j01;
        report.junction_h1_h2 = report.junction_h1_h2 && res.j12;
        report.endpoint_start_gap = std::max(report.endpoint_start_gap, res.start_gap);
        report.endpoint_end_gap = std::max(report.endpoint_end_gap, res.end_gap);
        report.mu_omega_gap = std::max(report.mu_omega_gap, res.mu_gap);
        if (!res.error.empty() && report.failure.empty())
            report.failure = res.error;
    }
    bool stages_ok = true;
    for (const auto& st : report.stages)
        stages_ok = stages_ok && st.pass;
    report.pass = report.failure.empty() && stages_ok && report.junction_h_h1 && report.junction_h1_h2 &&
                  report.endpoint_start_gap <= options.endpoint_tol && report.endpoint_end_gap <= options.endpoint_tol;
    return report;
}

} // namespace pbam
