#include "pbam/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "pbam/errors.hpp"

namespace pbam {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

// JSON has no nan/inf; they become null.
Json num(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

Json dots_to_json(const std::vector<Dot>& dots)
{
    Json out = Json::array();
    for (const auto& d : dots)
        out.push_back({num(d.t), num(d.s)});
    return out;
}

} // namespace

Json element_to_json(const Element& a)
{
    Json blocks = Json::array();
    for (const auto& m : a.blocks()) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                row.push_back({m(r, c).real(), m(r, c).imag()});
            rows.push_back(std::move(row));
        }
        blocks.push_back(std::move(rows));
    }
    return {{"algebra", a.algebra_id()}, {"payload", std::move(blocks)}};
}

Element element_from_json(const Json& j, const std::map<std::string, AlgebraPtr>& algebras)
{
    try {
        const auto id = j.at("algebra").get<std::string>();
        const auto it = algebras.find(id);
        if (it == algebras.end())
            throw ConfigError("element refers to unknown algebra " + id);
        Payload payload;
        for (const auto& rows : j.at("payload")) {
            const auto r = static_cast<Eigen::Index>(rows.size());
            const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
            Matrix m(r, c);
            for (Eigen::Index i = 0; i < r; ++i) {
                if (static_cast<Eigen::Index>(rows[i].size()) != c)
                    throw ConfigError("ragged element payload");
                for (Eigen::Index k = 0; k < c; ++k)
                    m(i, k) = Complex(rows[i][k].at(0).get<double>(), rows[i][k].at(1).get<double>());
            }
            payload.push_back(std::move(m));
        }
        if (!it->second->valid_payload(payload))
            throw ConfigError("element payload does not match algebra " + id);
        return it->second->make(std::move(payload));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed element: ") + e.what());
    }
}

Json reparam_to_json(const Reparameterization& phi) { return dots_to_json(phi.dots()); }

Reparameterization reparam_from_json(const Json& j)
{
    try {
        std::vector<Dot> dots;
        for (const auto& d : j)
            dots.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
        return Reparameterization(std::move(dots));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed dot list: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Json alpha_to_json(const AlphaFunction& alpha)
{
    Json points = Json::array();
    const auto& net = alpha.net();
    for (std::size_t i = 0; i < net.size(); ++i) {
        Json p = {{"point", net.ids[i]}, {"alpha", num(alpha.value(i))}};
        if (i < alpha.thresholds().size()) {
            p["T"] = num(alpha.thresholds()[i]);
            p["margin"] = num(alpha.value(i) - alpha.thresholds()[i]);
        }
        points.push_back(std::move(p));
    }
    return {{"radius", alpha.radius()}, {"points", std::move(points)}};
}

Json report_summary_to_json(const DefectReport& r)
{
    Json conds = Json::object();
    for (const auto& c : r.conditions)
        conds[c.name] = {{"head_max", num(c.head_max)},
                         {"tail_max", num(c.tail_max)},
                         {"decaying", c.decaying},
                         {"pass", c.pass}};
    Json moduli = Json::array();
    for (const auto& m : r.moduli) {
        Json e = {{"element", m.element_id}, {"epsilon", m.epsilon}, {"found", m.found}};
        if (m.found) {
            e["eta"] = num(m.eta);
            e["P"] = num(m.p);
        } else {
            e["note"] = m.note;
        }
        moduli.push_back(std::move(e));
    }
    Json profiles = Json::array();
    for (std::size_t i = 0; i < r.profiles.size(); ++i) {
        Json prof = Json::array();
        for (double v : r.profiles[i])
            prof.push_back(num(v));
        profiles.push_back({{"bounded", i < r.bounded.size() && r.bounded[i]}, {"sup", std::move(prof)}});
    }
    return {{"family", r.family_id},
            {"pass", r.pass},
            {"conditions", std::move(conds)},
            {"zero_image_max", num(r.zero_image_max)},
            {"profiles", std::move(profiles)},
            {"moduli", std::move(moduli)}};
}

Json certificate_to_json(const C1C3Certificate& c)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < c.c1.size(); ++i) {
        const auto& e = c.c1[i];
        Json c1 = {{"nu", e.nu}, {"found", e.found}};
        if (e.found) {
            c1["xi"] = e.xi;
            c1["Q"] = e.q_prime;
            c1["S"] = dots_to_json(e.s_prime);
        } else {
            c1["note"] = e.note;
        }
        Json c3 = Json::array();
        for (const auto& k : c.c3[i]) {
            Json row = {{"level", k.level}, {"found", k.found}, {"observed_max", num(k.observed_max)}};
            if (k.found) {
                row["M"] = num(k.m);
                row["Q"] = k.q;
                row["S"] = dots_to_json(k.s_n);
            } else {
                row["note"] = k.note;
            }
            c3.push_back(std::move(row));
        }
        out.push_back({{"element", i < c.element_ids.size() ? c.element_ids[i] : ""},
                       {"C1", std::move(c1)},
                       {"C3", std::move(c3)}});
    }
    return out;
}

Json search_to_json(const ReparamSearch& s)
{
    Json out = {{"success", s.success}, {"valid", s.valid()}};
    if (!s.success) {
        out["witness"] = s.witness;
        return out;
    }
    out["constraints"] = dots_to_json(s.constraints);
    out["phi"] = reparam_to_json(s.phi);
    out["theta_shift"] = s.theta_shift;
    out["phi_pbam"] = s.phi_pbam;
    out["theta_pbam"] = s.theta_pbam;
    out["blend_endpoints"] = s.blend_endpoints;
    if (s.phi_report)
        out["phi_report"] = report_summary_to_json(*s.phi_report);
    if (s.theta_report)
        out["theta_report"] = report_summary_to_json(*s.theta_report);
    return out;
}

Json sweep_summary_to_json(const HomotopySweep& s)
{
    Json out = {{"max_defect", num(s.max_defect)}, {"endpoints_exact", s.endpoints_exact}, {"broken", s.broken}};
    if (!s.witness.empty())
        out["witness"] = s.witness;
    return out;
}

Json pba_report_to_json(const PbaHomotopyReport& r)
{
    Json eta = Json::array();
    for (double v : r.eta)
        eta.push_back(num(v));
    Json out = {{"pass", r.pass},
                {"endpoints_ok", r.endpoints_ok},
                {"eta", std::move(eta)},
                {"endpoint_gap", num(r.endpoint_gap)},
                {"path_sweep", sweep_summary_to_json(r.path_sweep)},
                {"start_sweep", sweep_summary_to_json(r.start_sweep)},
                {"end_sweep", sweep_summary_to_json(r.end_sweep)}};
    if (!r.failure.empty())
        out["failure"] = r.failure;
    return out;
}

Json functoriality_to_json(const FunctorialityReport& r)
{
    auto list = [](const std::vector<double>& xs) {
        Json a = Json::array();
        for (double x : xs)
            a.push_back(num(x));
        return a;
    };
    Json stages = Json::array();
    for (const auto& s : r.stages) {
        Json st = {{"stage", s.name}, {"pass", s.pass}, {"max_defect", num(s.max_defect)}};
        if (!s.witness.empty())
            st["witness"] = s.witness;
        stages.push_back(std::move(st));
    }
    Json out = {{"pass", r.pass},
                {"stages", std::move(stages)},
                {"junction_h_h1", r.junction_h_h1},
                {"junction_h1_h2", r.junction_h1_h2},
                {"endpoint_start_gap", num(r.endpoint_start_gap)},
                {"endpoint_end_gap", num(r.endpoint_end_gap)},
                {"mu_omega_gap", num(r.mu_omega_gap)},
                {"psi", reparam_to_json(r.psi)},
                {"theta", reparam_to_json(r.theta)},
                {"alpha", list(r.alpha)},
                {"beta", list(r.beta_at_image)},
                {"gamma", list(r.gamma)},
                {"mu", list(r.mu)},
                {"lambda", list(r.lambda)},
                {"omega", list(r.omega)}};
    if (!r.failure.empty())
        out["failure"] = r.failure;
    return out;
}

void write_defect_csv(std::ostream& os, const std::vector<const DefectReport*>& reports)
{
    os << "family_id,element_id,t,level,defect_star,defect_scalar,defect_add,defect_mul,bound\n";
    for (const auto* r : reports)
        for (const auto& row : r->rows)
            os << row.family_id << ',' << row.element_id << ',' << format_double(row.t) << ',' << row.level << ','
               << format_double(row.star) << ',' << format_double(row.scalar) << ',' << format_double(row.add)
               << ',' << format_double(row.mul) << ',' << format_double(row.bound) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "v_id,p,defect\n";
    for (const auto& r : rows)
        os << r.v_id << ',' << format_double(r.p) << ',' << format_double(r.defect) << '\n';
}

void write_functoriality_csv(std::ostream& os, const std::vector<FunctorialityRow>& rows)
{
    os << "u_id,stage,p,defect\n";
    for (const auto& r : rows)
        os << r.u_id << ',' << r.stage << ',' << format_double(r.p) << ',' << format_double(r.defect) << '\n';
}

std::vector<DefectCsvRow> read_defect_csv(std::istream& is)
{
    std::vector<DefectCsvRow> rows;
    std::string line;
    if (!std::getline(is, line))
        return rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 9)
            throw ConfigError("defect CSV row with " + std::to_string(cells.size()) + " columns");
        DefectCsvRow r;
        r.family_id = cells[0];
        r.element_id = cells[1];
        r.t = std::stod(cells[2]);
        r.level = std::stoi(cells[3]);
        r.star = std::stod(cells[4]);
        r.scalar = std::stod(cells[5]);
        r.add = std::stod(cells[6]);
        r.mul = std::stod(cells[7]);
        r.bound = std::stod(cells[8]);
        rows.push_back(r);
    }
    return rows;
}

} // namespace pbam
