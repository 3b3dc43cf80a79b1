#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbam/family.hpp"

namespace pbam {

double defect_star(const AsymptoticFamily& f, const Element& a, double t, int n);
double defect_scalar(const AsymptoticFamily& f, const Element& a, Complex lambda, double t, int n);
double defect_add(const AsymptoticFamily& f, const Element& a, const Element& b, double t, int n);
double defect_mul(const AsymptoticFamily& f, const Element& a, const Element& b, double t, int n);

// Desk-scale stand-in for "for all t >= ...".
struct SamplingGrid {
    std::vector<double> t_values;
    std::vector<Element> test_elements;
    std::vector<std::string> element_ids; // defaults to e0, e1, ...
    std::vector<int> levels;

    void validate() const;
    std::string element_id(std::size_t i) const;
};

/// Uniform grid start, start+step, ..., up to and including stop.
std::vector<double> uniform_grid(double start, double stop, double step);

/// Per-level sup over the grid of |f_t(a)|_n (one entry per grid level).
std::vector<double> boundedness_profile(const AsymptoticFamily& f, const Element& a, const SamplingGrid& grid);

struct ModulusEntry {
    std::string element_id;
    double epsilon = 0.0;
    bool found = false;
    double eta = 0.0;
    double p = 0.0;
    std::string note;
};

struct ModulusOptions {
    int ladder_steps = 16;      // eta in eps * 2^{-k}, k < ladder_steps
    int directions = 4;         // random probe directions per radius
    unsigned long long seed = 0;
};

/// Searches eta = eps 2^{-k} (largest first) and P over grid values
/// (smallest first) until every probe x' with d(x,x') < eta satisfies
/// d(F_t(x), F_t(x')) < eps for all grid t >= P.
ModulusEntry sac_modulus_estimate(const AsymptoticFamily& f, const Element& x, double eps,
                                  const std::vector<double>& t_values, const ModulusOptions& options,
                                  const std::string& element_id = "x");

struct DefectRow {
    std::string family_id;
    std::string element_id;
    double t = 0.0;
    int level = 0;
    double star = 0.0;
    double scalar = 0.0;
    double add = 0.0;
    double mul = 0.0;
    double bound = 0.0; // |f_t(a)|_n
};

struct ConditionSummary {
    std::string name;
    double head_max = 0.0; // first quarter of the t-grid
    double tail_max = 0.0; // last quarter of the t-grid
    bool decaying = false; // tail_max <= decay_factor * head_max
    bool pass = false;     // tail_max <= tol or decaying
};

struct PbamTolerances {
    double defect_tol = 1e-9;
    double growth_factor = 2.0;
    double decay_factor = 0.5;
    double modulus_eps = 0.25;
    Complex lambda{0.7, -0.3};
    ModulusOptions modulus;
};

struct DefectReport {
    std::string family_id;
    std::vector<DefectRow> rows;
    std::vector<ConditionSummary> conditions; // star, scalar, add, mul
    std::vector<std::vector<double>> profiles; // per element, per level
    std::vector<bool> bounded;                 // per element
    std::vector<ModulusEntry> moduli;          // per element
    double zero_image_max = 0.0;               // max_t,n |f_t(0)|_n
    bool pass = false;

    const ConditionSummary& condition(const std::string& name) const;
};

/// Aggregates defect curves (pairs are element i with element i+1 mod m),
/// boundedness profiles and modulus estimates into one report.
DefectReport pbam_check(const AsymptoticFamily& f, const SamplingGrid& grid, const PbamTolerances& tol,
                        int jobs = 1);

/// Head/tail quarter summary of a sampled curve.
ConditionSummary summarize_curve(const std::string& name, const std::vector<double>& values, double tol,
                                 double decay_factor = 0.5);

} // namespace pbam
