#include "pbam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pbam/errors.hpp"
#include "pbam/funcalc.hpp"
#include "pbam/quasi.hpp"

namespace pbam {

namespace fs = std::filesystem;

namespace {

// FNV-1a, so every labelled random stream is fixed by (seed, label).
unsigned long long stream_seed(unsigned long long seed, const std::string& label)
{
    unsigned long long h = 1469598103934665603ULL ^ seed;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback)
{
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null())
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

const Json& require(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string("missing \"") + key + "\"");
    return j.at(key);
}

std::string require_string(const Json& j, const char* key)
{
    const Json& v = require(j, key);
    if (!v.is_string())
        throw ConfigError(std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

struct Grid {
    double start = 0.0, stop = 0.0, step = 1.0;
    std::vector<double> explicit_values;

    std::vector<double> values(std::optional<double> horizon) const
    {
        if (!explicit_values.empty())
            return explicit_values;
        return uniform_grid(start, horizon ? *horizon : stop, step);
    }
};

Grid parse_grid(const Json& j, Grid fallback)
{
    if (j.is_null())
        return fallback;
    if (j.is_array()) {
        Grid g;
        g.explicit_values = j.get<std::vector<double>>();
        if (g.explicit_values.empty() || !std::is_sorted(g.explicit_values.begin(), g.explicit_values.end()))
            throw ConfigError("explicit grids must be non-empty and sorted");
        return g;
    }
    if (!j.is_object())
        throw ConfigError("a grid is {start, stop, step} or an array of values");
    Grid g;
    g.start = get_or(j, "start", fallback.start);
    g.stop = get_or(j, "stop", fallback.stop);
    g.step = get_or(j, "step", fallback.step);
    if (!(g.step > 0.0) || g.stop < g.start || g.start < 0.0)
        throw ConfigError("grid needs 0 <= start <= stop and step > 0");
    return g;
}

class Context {
public:
    Context(const Json& config, const RunOptions& opts) : config_(config), opts_(opts)
    {
        if (!config.is_object())
            throw ConfigError("config must be a JSON object");
        name_ = get_or<std::string>(config, "name", "scenario");
        seed_ = opts.seed ? *opts.seed : get_or<unsigned long long>(config, "seed", 0);
        if (config.contains("algebras"))
            for (const auto& a : config.at("algebras"))
                add_algebra(a);
        if (config.contains("families"))
            for (const auto& f : config.at("families"))
                add_family(f);
        const Json grids = config.value("grids", Json::object());
        t_grid_ = parse_grid(grids.value("t", Json()), Grid{0.0, 10.0, 0.5, {}});
        s_grid_ = parse_grid(grids.value("s", Json()), t_grid_);
        p_count_ = get_or(grids, "p", 11);
        if (p_count_ < 2)
            throw ConfigError("p grid needs at least 2 points");
    }

    const std::string& name() const { return name_; }
    unsigned long long seed() const { return seed_; }
    int jobs() const { return std::max(1, opts_.jobs); }
    const RunOptions& options() const { return opts_; }
    const std::map<std::string, AlgebraPtr>& algebras() const { return algebras_; }

    std::vector<double> t_values(const Json& section) const
    {
        return parse_grid(section.value("t", Json()), t_grid_).values(opts_.horizon);
    }
    std::vector<double> s_values(const Json& section) const
    {
        return parse_grid(section.value("s", Json()), s_grid_).values(opts_.horizon);
    }
    std::vector<double> p_values(const Json& section) const
    {
        const int n = get_or(section, "p", p_count_);
        if (n < 2)
            throw ConfigError("p grid needs at least 2 points");
        std::vector<double> ps;
        for (int k = 0; k < n; ++k)
            ps.push_back(k == n - 1 ? 1.0 : static_cast<double>(k) / (n - 1));
        return ps;
    }

    std::mt19937_64 rng(const std::string& label) const { return std::mt19937_64(stream_seed(seed_, label)); }

    AlgebraPtr algebra(const std::string& id) const
    {
        const auto it = algebras_.find(id);
        if (it == algebras_.end())
            throw ConfigError("unknown algebra " + id);
        return it->second;
    }

    FamilyPtr family(const std::string& id) const
    {
        const auto it = families_.find(id);
        if (it == families_.end())
            throw ConfigError("unknown family " + id);
        return it->second;
    }

    // Test elements of `algebra` from an elements spec:
    // {"random": n, "scale": s} or {"list": [{"mode": k} | {"element": {...}}]}.
    std::vector<Element> elements(const Json& spec, const AlgebraPtr& algebra, const std::string& label) const
    {
        std::vector<Element> out;
        if (spec.is_object() && spec.contains("list")) {
            for (const auto& item : spec.at("list")) {
                if (item.contains("mode")) {
                    const auto* c = as_circle(*algebra);
                    if (!c)
                        throw ConfigError("\"mode\" elements need a circle algebra");
                    out.push_back(c->mode(item.at("mode").get<int>()));
                } else if (item.contains("element")) {
                    out.push_back(element_from_json(item.at("element"), algebras_));
                    require_same_owner(out.back(), algebra->zero(), "test element");
                } else {
                    throw ConfigError("element entries need \"mode\" or \"element\"");
                }
            }
        } else {
            const int n = get_or(spec, "random", 4);
            const double scale = get_or(spec, "scale", 0.5);
            auto gen = rng("elements/" + label);
            for (int i = 0; i < n; ++i)
                out.push_back(algebra->make(algebra->random(gen, scale)));
        }
        if (out.size() < 1)
            throw ConfigError("no test elements for " + label);
        return out;
    }

    SamplingGrid sampling_grid(const Json& section, const AlgebraPtr& domain, const std::string& label) const
    {
        SamplingGrid g;
        g.t_values = t_values(section);
        g.test_elements = elements(section.value("elements", Json::object()), domain, label);
        g.levels = get_or<std::vector<int>>(section, "levels", {0, 1, 2, 3});
        g.validate();
        return g;
    }

    PbamTolerances pbam_tolerances(const Json& section) const
    {
        PbamTolerances tol;
        const Json t = merged("tolerances", section);
        tol.defect_tol = get_or(t, "defect", tol.defect_tol);
        tol.growth_factor = get_or(t, "growth_factor", tol.growth_factor);
        tol.decay_factor = get_or(t, "decay_factor", tol.decay_factor);
        tol.modulus_eps = get_or(t, "modulus_eps", tol.modulus_eps);
        tol.modulus.ladder_steps = get_or(t, "modulus_ladder", tol.modulus.ladder_steps);
        tol.modulus.directions = get_or(t, "modulus_directions", tol.modulus.directions);
        tol.modulus.seed = stream_seed(seed_, "modulus");
        return tol;
    }

    // Global "tolerances" overridden by a section's own "tolerances".
    Json merged(const char* key, const Json& section) const
    {
        Json out = config_.value(key, Json::object());
        if (section.is_object() && section.contains(key))
            for (const auto& [k, v] : section.at(key).items())
                out[k] = v;
        return out;
    }

    QuasiUnitaryNet net(const Json& spec, const AlgebraPtr& algebra, const std::string& label) const
    {
        NetSpec ns;
        ns.count = get_or(spec, "count", ns.count);
        ns.perturbation = get_or(spec, "perturbation", ns.perturbation);
        ns.block = get_or(spec, "block", ns.block);
        ns.tolerance = get_or(spec, "tolerance", ns.tolerance);
        auto gen = rng("net/" + label);
        return random_net(algebra, ns, gen);
    }

private:
    void add_algebra(const Json& a)
    {
        const std::string id = require_string(a, "id");
        const std::string kind = require_string(a, "kind");
        const int levels = get_or(a, "levels", 6);
        AlgebraPtr alg;
        if (kind == "matrix")
            alg = matrix_algebra(get_or(a, "size", 0), levels, id);
        else if (kind == "circle")
            alg = smooth_circle_algebra(get_or(a, "cap", 0), levels, id);
        else if (kind == "path")
            alg = path_algebra(algebra(require_string(a, "inner")), get_or(a, "points", 11), id);
        else
            throw ConfigError("unknown algebra kind " + kind);
        if (!algebras_.emplace(id, alg).second)
            throw ConfigError("duplicate algebra " + id);
    }

    void add_family(const Json& f)
    {
        const std::string id = require_string(f, "id");
        const std::string kind = require_string(f, "kind");
        FamilyPtr fam;
        if (kind == "exact")
            fam = exact_hom(algebra(require_string(f, "algebra")), id);
        else if (kind == "compression")
            fam = compression_family(algebra(require_string(f, "algebra")), get_or(f, "ramp", 1.0), id);
        else if (kind == "perturbed")
            fam = perturbed_hom(algebra(require_string(f, "algebra")), get_or(f, "rate", 1.0), id);
        else if (kind == "trace_shift")
            fam = trace_shift_family(algebra(require_string(f, "algebra")), id);
        else if (kind == "toeplitz")
            fam = toeplitz_family(algebra(require_string(f, "domain")), algebra(require_string(f, "codomain")), id);
        else if (kind == "linear_blend")
            fam = linear_blend(family(require_string(f, "start")), family(require_string(f, "end")),
                               algebra(require_string(f, "path")), id);
        else if (kind == "composite")
            fam = compose_with(family(require_string(f, "inner")), family(require_string(f, "outer")),
                               reparam_from_json(require(f, "phi")), id);
        else
            throw ConfigError("unknown family kind " + kind);
        if (!families_.emplace(id, fam).second)
            throw ConfigError("duplicate family " + id);
    }

    const Json& config_;
    RunOptions opts_;
    std::string name_;
    unsigned long long seed_ = 0;
    std::map<std::string, AlgebraPtr> algebras_;
    std::map<std::string, FamilyPtr> families_;
    Grid t_grid_, s_grid_;
    int p_count_ = 11;
};

class Output {
public:
    Output(const RunOptions& opts, RunResult& result) : dir_(opts.out_dir), result_(result)
    {
        if (!dir_.empty())
            fs::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& text)
    {
        if (dir_.empty())
            return;
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os)
            throw Error("cannot write " + (dir_ / name).string());
        os << text;
        result_.files.push_back(name);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

private:
    fs::path dir_;
    RunResult& result_;
};

Json header(const Context& ctx, const std::string& command)
{
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"scenario", ctx.name()}, {"seed", ctx.seed()}};
}

std::vector<std::string> id_list(const Json& section, const char* key)
{
    return get_or<std::vector<std::string>>(section, key, {});
}

// "pass" or "fail" per item, default "pass".
bool meets_expectation(const Json& section, const std::string& id, bool pass, Json& entry)
{
    const Json expect = section.value("expect", Json::object());
    const std::string want = get_or<std::string>(expect, id.c_str(), "pass");
    if (want != "pass" && want != "fail")
        throw ConfigError("expect values are \"pass\" or \"fail\"");
    entry["verdict"] = pass ? "pass" : "fail";
    entry["expected"] = want;
    return (want == "pass") == pass;
}

// ------------------------------------------------------- verify-algebra

struct Violations {
    long count = 0;
    double worst = 0.0;
    void note(double excess)
    {
        if (excess > 0.0) {
            ++count;
            worst = std::max(worst, excess);
        }
    }
    Json json() const { return {{"violations", count}, {"worst_excess", worst}}; }
};

Json verify_one_algebra(const Context& ctx, const AlgebraPtr& alg, int trials, bool& pass)
{
    auto gen = ctx.rng("verify-algebra/" + alg->id());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int top = alg->levels() - 1;
    const double rel = 1e-9;
    Violations monotone, star, mul, homog, triangle, assoc, star_mul, involution, star_linear, useful;
    double useful_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < trials; ++k) {
        const Element a = alg->make(alg->random(gen, 1.0));
        const Element b = alg->make(alg->random(gen, 1.0));
        const Element c = alg->make(alg->random(gen, 1.0));
        const Complex lam(unit(gen), unit(gen));
        const auto na = alg->seminorms(a.payload());
        const auto nb = alg->seminorms(b.payload());
        const auto nas = alg->seminorms(a.adjoint().payload());
        const auto nab = alg->seminorms((a * b).payload());
        const auto nla = alg->seminorms((lam * a).payload());
        const auto nsum = alg->seminorms((a + b).payload());
        for (int n = 0; n <= top; ++n) {
            const double scale = 1.0 + na[static_cast<std::size_t>(n)] + nb[static_cast<std::size_t>(n)];
            const auto i = static_cast<std::size_t>(n);
            if (n < top) {
                monotone.note(na[i] - na[i + 1] - rel * scale);
                star.note(nas[i] - na[i + 1] - rel * scale);
                mul.note(nab[i] - na[i + 1] * nb[i + 1] - rel * scale * scale);
            }
            homog.note(std::abs(nla[i] - std::abs(lam) * na[i]) - rel * scale);
            triangle.note(nsum[i] - na[i] - nb[i] - rel * scale);
        }
        const double s3 = (1.0 + a.top_seminorm()) * (1.0 + b.top_seminorm()) * (1.0 + c.top_seminorm());
        assoc.note(((a * b) * c - a * (b * c)).top_seminorm() - rel * s3);
        star_mul.note(((a * b).adjoint() - b.adjoint() * a.adjoint()).top_seminorm() - rel * s3);
        involution.note((a.adjoint().adjoint() - a).top_seminorm());
        star_linear.note(((lam * a + b).adjoint() - (std::conj(lam) * a.adjoint() + b.adjoint())).top_seminorm() -
                         rel * s3);
        for (int n = 0; n + 3 <= alg->levels(); ++n) {
            const double m = check_useful45(b, c, n);
            useful_min = std::min(useful_min, m);
            useful.note(-m - 1e-12);
        }
    }
    const Violations* all[] = {&monotone, &star, &mul, &homog, &triangle, &assoc, &star_mul, &involution,
                               &star_linear, &useful};
    for (const auto* v : all)
        pass = pass && v->count == 0;
    return {{"algebra", alg->id()},
            {"kind", alg->kind()},
            {"trials", trials},
            {"monotone", monotone.json()},
            {"star_bound", star.json()},
            {"mul_bound", mul.json()},
            {"homogeneity", homog.json()},
            {"triangle", triangle.json()},
            {"associativity", assoc.json()},
            {"star_antimultiplicative", star_mul.json()},
            {"involution", involution.json()},
            {"star_conjugate_linear", star_linear.json()},
            {"useful45", {{"violations", useful.count}, {"min_margin", useful_min}}}};
}

int cmd_verify_algebra(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool pass = true;
    Json results = Json::array();
    const int trials = get_or(section, "trials", 200);
    for (const auto& id : id_list(section, "algebras"))
        results.push_back(verify_one_algebra(ctx, ctx.algebra(id), trials, pass));
    report["algebras"] = results;
    report["pass"] = pass;
    out.write_json("verify_algebra.json", report);
    return pass ? 0 : 1;
}

// -------------------------------------------------------------- funcalc

Json funcalc_one(const Context& ctx, const AlgebraPtr& alg, int trials, bool& pass)
{
    auto gen = ctx.rng("funcalc/" + alg->id());
    std::uniform_real_distribution<double> radius(0.0, 0.45);
    const SqrtDomain v = default_domain(alg);
    long isrp_fail = 0, taylor_fail = 0, polar_fail = 0;
    double worst_isrp = 0.0, worst_taylor_excess = 0.0, worst_polar = 0.0;
    for (int k = 0; k < trials; ++k) {
        const Element h = alg->make(alg->random(gen, 1.0));
        Element a = h + h.adjoint();
        const double target = radius(gen);
        const double norm = a.seminorm(v.norm_level);
        a = (norm > 0.0 ? target / norm : 0.0) * a;
        a = 0.5 * (a + a.adjoint());

        const IsrpCheck isrp = verify_isrp(a, v);
        worst_isrp = std::max({worst_isrp, isrp.commute_defect, isrp.annihilate_defect, isrp.zero_defect});
        isrp_fail += isrp.all() ? 0 : 1;

        if (a.top_seminorm() < 0.9) {
            const TaylorResult series = theta_taylor(a, 60);
            const double gap = (series.value - theta(a, v)).top_seminorm();
            const double excess = gap - series.remainder_bound - 1e-12;
            if (excess > 0.0) {
                ++taylor_fail;
                worst_taylor_excess = std::max(worst_taylor_excess, excess);
            }
        }

        const Element x = alg->make(alg->random(gen, 0.15));
        if (quasi_polar_defined(x, v)) {
            const double d = is_quasi_unitary(quasi_polar(x, v), 0.0).defect;
            worst_polar = std::max(worst_polar, d);
            polar_fail += d <= 1e-10 ? 0 : 1;
        }
    }
    pass = pass && isrp_fail == 0 && taylor_fail == 0 && polar_fail == 0;
    return {{"algebra", alg->id()},
            {"trials", trials},
            {"isrp_failures", isrp_fail},
            {"isrp_worst_defect", worst_isrp},
            {"taylor_failures", taylor_fail},
            {"taylor_worst_excess", worst_taylor_excess},
            {"quasi_polar_failures", polar_fail},
            {"quasi_polar_worst_defect", worst_polar}};
}

int cmd_funcalc(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool pass = true;
    Json results = Json::array();
    const int trials = get_or(section, "trials", 50);
    for (const auto& id : id_list(section, "algebras"))
        results.push_back(funcalc_one(ctx, ctx.algebra(id), trials, pass));
    report["algebras"] = results;
    report["pass"] = pass;
    out.write_json("funcalc.json", report);
    return pass ? 0 : 1;
}

// ----------------------------------------------------------------- pbam

bool compare_baseline(const fs::path& path, const std::vector<const DefectReport*>& reports, double tol,
                      Json& entry)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("baseline not found: " + path.string());
    const auto base = read_defect_csv(is);
    std::vector<DefectRow> now;
    for (const auto* r : reports)
        now.insert(now.end(), r->rows.begin(), r->rows.end());
    entry["file"] = path.filename().string();
    entry["rows"] = base.size();
    if (base.size() != now.size()) {
        entry["match"] = false;
        entry["reason"] = "row count " + std::to_string(now.size()) + " vs " + std::to_string(base.size());
        return false;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& b = base[i];
        const auto& n = now[i];
        if (b.family_id != n.family_id || b.element_id != n.element_id || b.level != n.level ||
            std::abs(b.t - n.t) > tol) {
            entry["match"] = false;
            entry["reason"] = "key mismatch at row " + std::to_string(i);
            return false;
        }
        for (auto [x, y] : {std::pair{b.star, n.star}, {b.scalar, n.scalar}, {b.add, n.add}, {b.mul, n.mul},
                            {b.bound, n.bound}})
            worst = std::max(worst, std::abs(x - y));
    }
    entry["max_abs_diff"] = worst;
    entry["tolerance"] = tol;
    entry["match"] = worst <= tol;
    return worst <= tol;
}

int cmd_pbam(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool ok = true;
    const PbamTolerances tol = ctx.pbam_tolerances(section);
    std::vector<DefectReport> reports;
    Json families = Json::array();
    for (const auto& id : id_list(section, "families")) {
        const FamilyPtr f = ctx.family(id);
        const SamplingGrid grid = ctx.sampling_grid(section, f->domain(), id);
        reports.push_back(pbam_check(*f, grid, tol, ctx.jobs()));
        Json entry = report_summary_to_json(reports.back());
        ok = meets_expectation(section, id, reports.back().pass, entry) && ok;
        families.push_back(std::move(entry));
    }
    std::vector<const DefectReport*> ptrs;
    for (const auto& r : reports)
        ptrs.push_back(&r);
    if (section.contains("baseline")) {
        const Json& b = section.at("baseline");
        fs::path file = require_string(b, "file");
        if (file.is_relative())
            file = ctx.options().config_dir / file;
        Json entry;
        ok = compare_baseline(file, ptrs, get_or(b, "tolerance", 1e-12), entry) && ok;
        report["baseline"] = entry;
    }
    report["families"] = families;
    report["pass"] = ok;
    std::ostringstream csv;
    write_defect_csv(csv, ptrs);
    out.write("pbam_defects.csv", csv.str());
    out.write_json("pbam_report.json", report);
    return ok ? 0 : 1;
}

// -------------------------------------------------------------- retract

int cmd_retract(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool ok = true;
    const auto t_values = ctx.t_values(section);
    const auto p_values = ctx.p_values(section);
    const double radius = get_or(section, "alpha_radius", 0.0);
    const double defect_tol = get_or(section, "defect_tol", 1e-8);
    const double sweep_tol = get_or(section, "sweep_tol", 1e-7);
    const double gamma_shift = get_or(section, "gamma_shift", 2.0);
    std::vector<SweepRow> sweep_rows;
    Json families = Json::array();
    for (const auto& id : id_list(section, "families")) {
        const FamilyPtr f = ctx.family(id);
        const SqrtDomain v = default_domain(f->codomain());
        const QuasiUnitaryNet net = ctx.net(section.value("net", Json::object()), f->domain(), id);
        Json entry = {{"family", id}, {"net_size", net.size()}};
        bool pass = true;
        try {
            const AlphaFunction alpha = build_alpha(*f, net, v, t_values, radius, ctx.jobs());
            entry["alpha"] = alpha_to_json(alpha);
            double worst = 0.0;
            for (const auto& u : net.points)
                worst = std::max(worst, is_quasi_unitary(retract_representative(*f, alpha, u, v), 0.0).defect);
            entry["representative_max_defect"] = worst;
            pass = worst <= defect_tol;
            std::vector<double> shifted = alpha.values();
            for (auto& x : shifted)
                x += gamma_shift;
            const AlphaFunction gamma(net, shifted, radius);
            HomotopySweep sweep = alpha_homotopy_sweep(*f, alpha, gamma, p_values, v);
            entry["alpha_homotopy"] = sweep_summary_to_json(sweep);
            pass = pass && !sweep.broken && sweep.endpoints_exact && sweep.max_defect <= sweep_tol;
            for (auto& r : sweep.rows) {
                r.v_id = id + ":" + r.v_id;
                sweep_rows.push_back(r);
            }
        } catch (const Error& e) {
            entry["failure"] = e.what();
            pass = false;
        }
        ok = meets_expectation(section, id, pass, entry) && ok;
        families.push_back(std::move(entry));
    }
    Json homotopies = Json::array();
    for (const auto& id : id_list(section, "homotopies")) {
        const auto h = std::dynamic_pointer_cast<const HomotopyFamily>(ctx.family(id));
        if (!h)
            throw ConfigError(id + " is not a homotopy family");
        const QuasiUnitaryNet net = ctx.net(section.value("net", Json::object()), h->domain(), id);
        const SqrtDomain v = default_domain(h->start()->codomain());
        Json entry = {{"homotopy", id}};
        PbaHomotopyReport r;
        try {
            r = pba_homotopy_check(*h, net, t_values, p_values, v, sweep_tol, radius, ctx.jobs());
            entry["report"] = pba_report_to_json(r);
        } catch (const InvalidHomotopy& e) {
            entry["failure"] = e.what();
        }
        ok = meets_expectation(section, id, r.pass, entry) && ok;
        homotopies.push_back(std::move(entry));
    }
    report["families"] = families;
    report["homotopies"] = homotopies;
    report["pass"] = ok;
    std::ostringstream csv;
    write_sweep_csv(csv, sweep_rows);
    out.write("retract_sweep.csv", csv.str());
    out.write_json("retract_report.json", report);
    return ok ? 0 : 1;
}

// -------------------------------------------------------------- compose

struct ChainSetup {
    std::string id;
    FamilyPtr f, g;
    SamplingGrid grid;
    CompositionGrids grids;
};

ChainSetup chain_setup(const Context& ctx, const Json& chain)
{
    ChainSetup c;
    c.f = ctx.family(require_string(chain, "f"));
    c.g = ctx.family(require_string(chain, "g"));
    c.id = get_or<std::string>(chain, "id", c.g->id() + "o" + c.f->id());
    if (c.f->codomain()->id() != c.g->domain()->id())
        throw ConfigError("chain " + c.id + " does not compose");
    c.grid = ctx.sampling_grid(chain, c.f->domain(), c.id);
    c.grids = {ctx.t_values(chain), ctx.s_values(chain)};
    return c;
}

ReparamSearch run_search(const Context& ctx, const Json& chain, const ChainSetup& c, C1C3Certificate& cert)
{
    ProbeOptions probe;
    probe.directions = get_or(chain, "probe_directions", probe.directions);
    probe.ladder_steps = get_or(chain, "probe_ladder", probe.ladder_steps);
    probe.seed = stream_seed(ctx.seed(), "probe/" + c.id);
    cert = certify_C1C3(*c.f, *c.g, c.grid, get_or(chain, "nu", 0.25), c.grids, probe, ctx.jobs());
    TolSchedule tol;
    tol.base = get_or(chain, "tol", tol.base);
    tol.decay = get_or(chain, "tol_decay", tol.decay);
    return search_reparam(c.f, c.g, c.grid, c.grids, tol, cert, ctx.pbam_tolerances(chain),
                          get_or(chain, "blend_points", 5), ctx.jobs());
}

bool monotone(const Reparameterization& phi)
{
    const auto& d = phi.dots();
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i].s < d[i - 1].s)
            return false;
    return true;
}

int cmd_compose(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool ok = true;
    Json chains = Json::array();
    for (const auto& chain : section.value("chains", Json::array())) {
        const ChainSetup c = chain_setup(ctx, chain);
        C1C3Certificate cert;
        const ReparamSearch s = run_search(ctx, chain, c, cert);
        Json entry = {{"chain", c.id}, {"certificate", certificate_to_json(cert)}, {"complete", cert.complete()},
                      {"search", search_to_json(s)}};
        const bool pass = cert.complete() && s.valid() && monotone(s.phi);
        if (s.success)
            out.write_json("compose_" + c.id + "_phi.json",
                           {{"schema_version", kSchemaVersion}, {"chain", c.id}, {"phi", reparam_to_json(s.phi)}});
        ok = meets_expectation(section, c.id, pass, entry) && ok;
        chains.push_back(std::move(entry));
    }
    report["chains"] = chains;
    report["pass"] = ok;
    out.write_json("compose_report.json", report);
    return ok ? 0 : 1;
}

// -------------------------------------------------------- functoriality

int cmd_functoriality(const Context& ctx, const Json& section, Output& out, Json& report)
{
    bool ok = true;
    Json chains = Json::array();
    for (const auto& chain : section.value("chains", Json::array())) {
        const ChainSetup c = chain_setup(ctx, chain);
        Json entry = {{"chain", c.id}};
        Reparameterization phi;
        if (chain.contains("phi") && chain.at("phi").is_array()) {
            phi = reparam_from_json(chain.at("phi"));
        } else {
            C1C3Certificate cert;
            const ReparamSearch s = run_search(ctx, chain, c, cert);
            if (!s.success) {
                entry["failure"] = "reparameterisation search failed: " + s.witness;
                ok = meets_expectation(section, c.id, false, entry) && ok;
                chains.push_back(std::move(entry));
                continue;
            }
            phi = s.phi;
        }
        entry["phi"] = reparam_to_json(phi);
        const QuasiUnitaryNet net = ctx.net(chain.value("net", Json::object()), c.f->domain(), c.id);
        FunctorialityOptions fo;
        fo.p_values = ctx.p_values(chain);
        fo.quasi_unitary_tol = get_or(chain, "quasi_unitary_tol", fo.quasi_unitary_tol);
        fo.endpoint_tol = get_or(chain, "endpoint_tol", fo.endpoint_tol);
        fo.alpha_radius = get_or(chain, "alpha_radius", fo.alpha_radius);
        fo.refine = get_or(chain, "refine", fo.refine);
        fo.jobs = ctx.jobs();
        const FunctorialityReport r = functoriality_check(c.f, c.g, phi, net, c.grids, default_domain(c.f->codomain()),
                                                          default_domain(c.g->codomain()), fo);
        entry["report"] = functoriality_to_json(r);
        std::ostringstream csv;
        write_functoriality_csv(csv, r.rows);
        out.write("functoriality_" + c.id + ".csv", csv.str());
        ok = meets_expectation(section, c.id, r.pass, entry) && ok;
        chains.push_back(std::move(entry));
    }
    report["chains"] = chains;
    report["pass"] = ok;
    out.write_json("functoriality_report.json", report);
    return ok ? 0 : 1;
}

const std::map<std::string, std::pair<std::string, int (*)(const Context&, const Json&, Output&, Json&)>>&
command_table()
{
    static const std::map<std::string, std::pair<std::string, int (*)(const Context&, const Json&, Output&, Json&)>>
        table = {{"verify-algebra", {"verify_algebra", cmd_verify_algebra}},
                 {"funcalc", {"funcalc", cmd_funcalc}},
                 {"pbam", {"pbam", cmd_pbam}},
                 {"retract", {"retract", cmd_retract}},
                 {"compose", {"compose", cmd_compose}},
                 {"functoriality", {"functoriality", cmd_functoriality}}};
    return table;
}

} // namespace

const std::vector<std::string>& scenario_commands()
{
    static const std::vector<std::string> names = {"verify-algebra", "funcalc", "pbam",
                                                   "retract",        "compose", "functoriality"};
    return names;
}

Json load_config(const fs::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config " + path.string());
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

RunResult run_command(const std::string& command, const Json& config, const RunOptions& options)
{
    RunResult result;
    const auto& table = command_table();
    const auto it = table.find(command);
    if (it == table.end()) {
        result.exit_code = 2;
        result.message = "unknown command " + command;
        return result;
    }
    try {
        const Context ctx(config, options);
        const Json section = config.value(it->second.first, Json::object());
        Output out(options, result);
        result.report = header(ctx, command);
        result.exit_code = it->second.second(ctx, section, out, result.report);
        result.message = result.exit_code == 0 ? "pass" : "check failure";
    } catch (const ConfigError& e) {
        result.exit_code = 2;
        result.message = std::string("config error: ") + e.what();
    } catch (const Json::exception& e) {
        result.exit_code = 2;
        result.message = std::string("config error: ") + e.what();
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.message = std::string("check failure: ") + e.what();
    }
    return result;
}

} // namespace pbam
