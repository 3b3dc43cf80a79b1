#pragma once

#include <random>
#include <string>
#include <vector>

#include "pbam/family.hpp"
#include "pbam/funcalc.hpp"

namespace pbam {

// Finite stand-in for U(A).
struct QuasiUnitaryNet {
    std::vector<Element> points;
    std::vector<std::string> ids;
    Eigen::MatrixXd distances; // canonical metric, pairwise
    double tolerance = 1e-10;

    std::size_t size() const { return points.size(); }
};

/// Validates every point (quasi-unitary defect <= tol) and fills the
/// distance matrix. Throws Error on an invalid point.
QuasiUnitaryNet make_net(std::vector<Element> points, double tol = 1e-10, std::vector<std::string> ids = {});

struct NetSpec {
    int count = 20;
    double perturbation = 0.05;
    int block = 0; // matrices only: support in the top-left block x block corner (0 = full)
    double tolerance = 1e-10;
};

/// Random quasi-unitaries: known ones (1+u unitary) nudged by a small random
/// element and pulled back with quasi_polar.
QuasiUnitaryNet random_net(const AlgebraPtr& algebra, const NetSpec& spec, std::mt19937_64& rng);

/// Smallest grid t0 with F_t(u).F_t(u)* and F_t(u)*.F_t(u) in V for every
/// sampled t >= t0. Each grid interval is also sampled at `refine` - 1
/// interior points, since membership need not be monotone in t.
/// Throws ThresholdNotFound.
double scan_threshold(const AsymptoticFamily& f, const Element& u, const SqrtDomain& v,
                      const std::vector<double>& t_values, int refine = 4);

// Threshold function on a net: alpha(v) is the max of the stored values of
// all net points within `radius` of v, or the nearest point's value when
// none is that close.
class AlphaFunction {
public:
    AlphaFunction() = default;
    AlphaFunction(QuasiUnitaryNet net, std::vector<double> values, double radius,
                  std::vector<double> thresholds = {});

    double operator()(const Element& v) const;
    double value(std::size_t i) const { return values_.at(i); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& thresholds() const { return thresholds_; }
    const QuasiUnitaryNet& net() const { return net_; }
    double radius() const { return radius_; }

    /// Pointwise max over net points (same net required).
    static AlphaFunction pointwise_max(const std::vector<const AlphaFunction*>& parts);

private:
    QuasiUnitaryNet net_;
    std::vector<double> values_;
    std::vector<double> thresholds_;
    double radius_ = 0.0;
};

/// Per-point scans plus a one-grid-step safety margin.
AlphaFunction build_alpha(const AsymptoticFamily& f, const QuasiUnitaryNet& net, const SqrtDomain& v,
                          const std::vector<double>& t_values, double radius = 0.0, int jobs = 1,
                          int refine = 4);

/// F_t(v) . theta(F_t(v)* . F_t(v)).
Element retract_at(const AsymptoticFamily& f, const Element& v, double t, const SqrtDomain& dom);

/// The representative f~_alpha(v).
Element retract_representative(const AsymptoticFamily& f, const AlphaFunction& alpha, const Element& v,
                               const SqrtDomain& dom);

/// H(v,p) = f~_{p alpha + (1-p) gamma}(v); requires gamma(v) >= alpha(v).
Element alpha_homotopy(const AsymptoticFamily& f, const AlphaFunction& alpha, const AlphaFunction& gamma,
                       const Element& v, double p, const SqrtDomain& dom);

struct SweepRow {
    std::string v_id;
    double p = 0.0;
    double defect = 0.0;
};

struct HomotopySweep {
    std::vector<SweepRow> rows;
    double max_defect = 0.0;
    bool endpoints_exact = true; // H(v,0) = f~_gamma(v), H(v,1) = f~_alpha(v)
    bool broken = false;         // domain violation somewhere
    std::string witness;
};

HomotopySweep alpha_homotopy_sweep(const AsymptoticFamily& f, const AlphaFunction& alpha,
                                   const AlphaFunction& gamma, const std::vector<double>& p_values,
                                   const SqrtDomain& dom);

struct PbaHomotopyReport {
    bool endpoints_ok = false;
    bool pass = false;
    std::vector<double> eta; // per net point, max{alpha, beta, gamma}
    HomotopySweep path_sweep;    // H(v,p) = h~_eta(v)(p)
    HomotopySweep start_sweep;   // f~_alpha ~ f~_eta
    HomotopySweep end_sweep;     // g~_beta ~ g~_eta
    double endpoint_gap = 0.0;   // max |H(v,0) - f~_eta(v)|, |H(v,1) - g~_eta(v)|
    std::string failure;
};

/// Checks the endpoint identities of h on the net and grid, then follows
/// the homotopy-invariance argument with eta = max{alpha, beta, gamma}.
PbaHomotopyReport pba_homotopy_check(const HomotopyFamily& h, const QuasiUnitaryNet& net,
                                     const std::vector<double>& t_values, const std::vector<double>& p_values,
                                     const SqrtDomain& v_b, double tol, double radius = 0.0, int jobs = 1);

} // namespace pbam
