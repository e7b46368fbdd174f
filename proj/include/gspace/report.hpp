#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "gspace/properties.hpp"
#include "gspace/solvers.hpp"

namespace gspace {

// Non-finite numbers become the strings "inf", "-inf" and "nan".
nlohmann::json number_json(double v);

nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const CoefficientEstimate& e);
nlohmann::json to_json(const ProximalCore& core, const SampleSet& a, const SampleSet& b);
// Trace summary plus every column; CSV is the plot-ready form.
nlohmann::json to_json(const Trace& t);
nlohmann::json to_json(const BerindeResult& r);

std::string to_text(const PropertyReport& r);
std::string to_text(const CoefficientEstimate& e);
std::string to_text(const Trace& t);

// Columns: step, x1..xd, step_residual, proximity_residual, apriori_bound.
// Entries that do not apply are left empty.
void write_trace_csv(std::ostream& out, const Trace& t);

// "u1=(0,0.5);x1=(0,0)" in the report's role order.
std::string witness_text(const std::vector<NamedPoint>& w);

}  // namespace gspace
