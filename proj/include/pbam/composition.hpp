#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbam/defects.hpp"
#include "pbam/family.hpp"
#include "pbam/funcalc.hpp"
#include "pbam/reparam.hpp"
#include "pbam/unitary_class.hpp"

namespace pbam {

// (g o_phi f)_t(a) = g_{phi(t)}(f_t(a)).
class CompositeFamily final : public AsymptoticFamily {
public:
    CompositeFamily(std::string id, FamilyPtr f, FamilyPtr g, Reparameterization phi);

    const FamilyPtr& inner() const { return f_; }
    const FamilyPtr& outer() const { return g_; }
    const Reparameterization& phi() const { return phi_; }

protected:
    Element eval(const Element& a, double t) const override;

private:
    FamilyPtr f_;
    FamilyPtr g_;
    Reparameterization phi_;
};

using CompositePtr = std::shared_ptr<const CompositeFamily>;

/// Throws AlgebraMismatch unless codomain(f) = domain(g).
CompositePtr compose_with(FamilyPtr f, FamilyPtr g, Reparameterization phi, std::string id = {});

/// h_t(a)(p) = g_{p phi(t) + (1-p) theta(t)}(f_t(a)); p = 0 is g o_theta f,
/// p = 1 is g o_phi f.
HomotopyPtr reparam_blend(const FamilyPtr& f, const FamilyPtr& g, const Reparameterization& phi,
                          const Reparameterization& theta, AlgebraPtr path);

struct CompositionGrids {
    std::vector<double> t_values;
    std::vector<double> s_values;
};

struct ProbeOptions {
    int directions = 3;
    int ladder_steps = 12;
    unsigned long long seed = 0;
};

struct C1Entry {
    double nu = 0.0;
    bool found = false;
    double xi = 0.0;
    double q_prime = 0.0;
    std::vector<Dot> s_prime; // (t, S'(t)) for grid t >= Q'
    std::string note;
};

/// Finds xi (ladder nu 2^{-k}), Q' and S'(t) so that probes b with
/// d(f_t(a), b) < xi satisfy d(g_s(f_t(a)), g_s(b)) < nu for grid s >= S'(t).
C1Entry check_C1(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a, double nu,
                 const CompositionGrids& grids, const ProbeOptions& options = {});

struct C3Entry {
    int level = 0;
    bool found = false;
    double q = 0.0;
    double m = 0.0;
    std::vector<Dot> s_n; // (t, S_n(t))
    double observed_max = 0.0;
    std::string note;
};

/// M_n is the largest value of |g_s(f_t(a))|_n over the upper halves of both
/// grids; Q_n and S_n(t) are then the smallest grid values beyond which the
/// sampled values stay <= M_n.
C3Entry check_C3(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a, int n,
                 const CompositionGrids& grids);

struct C1C3Certificate {
    std::vector<std::string> element_ids;
    std::vector<C1Entry> c1;               // one per element
    std::vector<std::vector<C3Entry>> c3;  // per element, per level
    bool complete() const;
};

C1C3Certificate certify_C1C3(const AsymptoticFamily& f, const AsymptoticFamily& g, const SamplingGrid& elements,
                             double nu, const CompositionGrids& grids, const ProbeOptions& options = {},
                             int jobs = 1);

struct TolSchedule {
    double base = 1e-2;
    double decay = 0.0; // tol(t) = base / (1 + decay t)
    double operator()(double t) const { return base / (1.0 + decay * t); }
};

struct ReparamSearch {
    bool success = false;
    std::vector<Dot> constraints; // (t_i, minimal s_i) before the cumulative max
    Reparameterization phi;
    std::string witness;          // failure witness

    // Validity evidence.
    bool phi_pbam = false;
    bool theta_pbam = false;
    bool blend_endpoints = false;
    double theta_shift = 0.0;
    std::optional<DefectReport> phi_report;
    std::optional<DefectReport> theta_report;

    bool valid() const { return success && phi_pbam && theta_pbam && blend_endpoints; }
};

/// For each grid t_i, the smallest grid s_i beyond which g's defects on the
/// images f_{t_i}(.) stay within tol(t_i) and, for t_i >= Q_n, the C3
/// bounds M_n + 1 hold;
/// phi joins the dots (t_i, s_i). Evidence: g o_phi f and g o_{phi+ds} f
/// pass pbam_check and the blend between them has exact endpoints.
ReparamSearch search_reparam(const FamilyPtr& f, const FamilyPtr& g, const SamplingGrid& elements,
                             const CompositionGrids& grids, const TolSchedule& tol,
                             const C1C3Certificate& certificate, const PbamTolerances& pbam_tol,
                             int p_points = 5, int jobs = 1);

/// f_t(u) . theta(p (f_t(u)* . f_t(u))).
Element hat_f(const AsymptoticFamily& f, const Element& u, double t, double p, const SqrtDomain& v_b);

/// g_s(hat f_{t,p}(u)) . theta_C(g_s(...)* . g_s(...)). Throws DomainViolation
/// naming the failing clause.
Element r_map(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& u, double s, double t,
              double p, const SqrtDomain& v_b, const SqrtDomain& v_c);

/// Quasi-polar in C of g_s(x), with the clause named on failure.
Element retract_image(const AsymptoticFamily& g, const Element& x, double s, const SqrtDomain& v_c);

// ------------------------------------------------------------ inequalities

/// Margins (RHS - LHS) of the four composition inequalities with
/// x = g_s(f_t(a)), y = g_s(b), x2 = g_s(f_t(a')), y2 = g_s(b').
struct C2Margins {
    double star = 0.0;
    double scalar = 0.0;
    double add = 0.0;
    double mul = 0.0;
    double min() const;
};

C2Margins c2_margins(const Element& x, const Element& y, const Element& x2, const Element& y2, Complex lambda,
                         Complex mu, int n);

C2Margins c2_margins(const AsymptoticFamily& f, const AsymptoticFamily& g, const Element& a,
                         const Element& a2, const Element& b, const Element& b2, double s, double t, Complex lambda,
                         Complex mu, int n);

/// RHS - LHS of |y . b - q|_n <= |y - q|_{n+1} + |b|_{n+1}(1 + |q|_{n+1} + |y - q|_{n+1}).
double product_shift_margin(const Element& y, const Element& b, const Element& q, int n);

// ----------------------------------------------------------- functoriality

struct FunctorialityOptions {
    std::vector<double> p_values;     // sweep grid for h, h', h''
    double quasi_unitary_tol = 1e-8;  // (i)
    double endpoint_tol = 1e-8;       // (iii)
    double alpha_radius = 0.0;
    int refine = 4;                   // interior samples per grid interval in threshold scans
    int jobs = 1;
};

struct FunctorialityRow {
    std::string u_id;
    std::string stage; // h, h1, h2
    double p = 0.0;
    double defect = 0.0;
};

struct StageResult {
    std::string name;
    bool pass = true;
    double max_defect = 0.0;
    std::string witness;
};

struct FunctorialityReport {
    bool pass = false;
    std::vector<StageResult> stages;     // h, h1, h2
    bool junction_h_h1 = false;          // h_1 = h'_0 exactly
    bool junction_h1_h2 = false;         // h'_1 = h''_0 exactly
    double endpoint_start_gap = 0.0;     // |h_0 - (g o_psi f)~_omega|
    double endpoint_end_gap = 0.0;       // |h''_1 - g~_beta(f~_lambda)|
    double mu_omega_gap = 0.0;           // |(g o_psi f)~_mu - (g o_psi f)~_omega|, informational
    Reparameterization psi;
    Reparameterization theta;            // s-threshold for r_map
    std::vector<double> alpha, beta_at_image, gamma, mu, lambda, omega;
    std::vector<FunctorialityRow> rows;
    std::string failure;
};

/// Follows the three concatenated homotopies h, h', h'' on every net point.
FunctorialityReport functoriality_check(const FamilyPtr& f, const FamilyPtr& g, const Reparameterization& phi,
                                        const QuasiUnitaryNet& net, const CompositionGrids& grids,
                                        const SqrtDomain& v_b, const SqrtDomain& v_c,
                                        const FunctorialityOptions& options);

} // namespace pbam
