#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbam/composition.hpp"
#include "pbam/defects.hpp"
#include "pbam/reparam.hpp"
#include "pbam/unitary_class.hpp"

namespace pbam {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// %.17g, with nan/inf spelled out.
std::string format_double(double x);

// {"algebra": id, "payload": [[[re, im], ...], ...]} one row list per block.
Json element_to_json(const Element& a);
Element element_from_json(const Json& j, const std::map<std::string, AlgebraPtr>& algebras);

Json reparam_to_json(const Reparameterization& phi);
Reparameterization reparam_from_json(const Json& j);

Json alpha_to_json(const AlphaFunction& alpha);
Json report_summary_to_json(const DefectReport& r);
Json certificate_to_json(const C1C3Certificate& c);
Json search_to_json(const ReparamSearch& s);
Json sweep_summary_to_json(const HomotopySweep& s);
Json pba_report_to_json(const PbaHomotopyReport& r);
Json functoriality_to_json(const FunctorialityReport& r);

// CSV writers; numbers use format_double.
void write_defect_csv(std::ostream& os, const std::vector<const DefectReport*>& reports);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_functoriality_csv(std::ostream& os, const std::vector<FunctorialityRow>& rows);

struct DefectCsvRow {
    std::string family_id, element_id;
    double t = 0.0;
    int level = 0;
    double star = 0.0, scalar = 0.0, add = 0.0, mul = 0.0, bound = 0.0;
};

std::vector<DefectCsvRow> read_defect_csv(std::istream& is);

} // namespace pbam
