#include "gspace/report.hpp"

#include <cmath>
#include <sstream>

namespace gspace {

using nlohmann::json;

json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

json witness_json(const std::vector<NamedPoint>& w) {
  json out = json::array();
  for (const auto& np : w) out.push_back({{"role", np.role}, {"point", to_string(np.point)}});
  return out;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return expr::format_number(v);
}

}  // namespace

std::string witness_text(const std::vector<NamedPoint>& w) {
  std::string out;
  for (const auto& np : w) {
    if (!out.empty()) out += ';';
    out += np.role + "=" + to_string(np.point);
  }
  return out;
}

json to_json(const PropertyReport& r) {
  json j = {{"check", r.check},
            {"verdict", std::string(to_string(r.verdict))},
            {"vacuous", r.vacuous},
            {"beta", number_json(r.beta)},
            {"n_cap", number_json(r.n_cap)},
            {"examined", r.examined},
            {"total", r.total}};
  if (!r.holds() || !r.witness.empty()) {
    j["witness"] = witness_json(r.witness);
    j["lhs"] = number_json(r.lhs);
    j["rhs"] = number_json(r.rhs);
  }
  if (r.lambda) j["lambda"] = number_json(*r.lambda);
  return j;
}

json to_json(const CoefficientEstimate& e) {
  json j = {{"defined", e.defined}, {"examined", e.examined}, {"sampled", e.sampled}};
  if (e.defined) {
    j["value"] = number_json(e.value);
    j["argmax"] = witness_json(e.argmax);
  }
  return j;
}

json to_json(const ProximalCore& core, const SampleSet& a, const SampleSet& b) {
  json ag = json::array(), bg = json::array(), wit = json::array();
  for (std::size_t i = 0; i < core.a_g.size(); ++i) ag.push_back(to_string(core.a_g.point(i)));
  for (std::size_t i = 0; i < core.b_g.size(); ++i) bg.push_back(to_string(core.b_g.point(i)));
  for (const auto& [p, q] : core.witnesses(a, b)) wit.push_back({to_string(p), to_string(q)});
  return {{"d_g", core.d_g}, {"a_g", ag}, {"b_g", bg}, {"witnesses", wit}};
}

json to_json(const Trace& t) {
  json j = {{"scheme", t.scheme},
            {"verdict", std::string(to_string(t.verdict))},
            {"steps", t.steps()},
            {"final", to_string(t.final)}};
  if (!t.proximity_residuals.empty()) j["final_proximity_residual"] = number_json(t.proximity_residuals.back());
  if (t.step_residuals.size() > 1) j["final_step_residual"] = number_json(t.step_residuals.back());
  if (t.post_residual) j["post_residual"] = number_json(*t.post_residual);
  if (t.unmatched) j["unmatched"] = to_string(*t.unmatched);
  return j;
}

json to_json(const BerindeResult& r) {
  json battery = json::array(), stages = json::array();
  for (const auto& b : r.battery) battery.push_back(to_json(b));
  for (const auto& s : r.stages) {
    json st = {{"n", s.n}, {"a_n", s.a_n}, {"beta_n", s.beta_n}, {"n_cap", s.n_cap}};
    if (s.error) {
      st["error"] = *s.error;
    } else {
      st["check"] = to_json(s.check);
      st["trace"] = to_json(s.trace);
    }
    stages.push_back(std::move(st));
  }
  return {{"d_g", r.d_g}, {"battery", battery}, {"warnings", r.warnings}, {"stages", stages}, {"trace", to_json(r.trace)}};
}

std::string to_text(const PropertyReport& r) {
  std::ostringstream o;
  o << r.check << ": " << to_string(r.verdict);
  if (r.vacuous) o << " (vacuous: nothing qualified)";
  o << " [" << r.examined << "/" << r.total << " tuples]";
  if (!r.holds()) {
    o << "\n  witness " << witness_text(r.witness);
    if (r.lambda) o << " l=" << num(*r.lambda);
    o << "\n  lhs=" << num(r.lhs) << " rhs=" << num(r.rhs);
  }
  return o.str();
}

std::string to_text(const CoefficientEstimate& e) {
  if (!e.defined) return "coefficient: undefined (no tuple with a nonzero denominator)";
  std::ostringstream o;
  o << "coefficient: " << num(e.value) << (e.sampled ? " (sampled)" : "") << " at " << witness_text(e.argmax);
  return o.str();
}

std::string to_text(const Trace& t) {
  std::ostringstream o;
  o << t.scheme << ": " << to_string(t.verdict) << " after " << t.steps() << " steps, final " << to_string(t.final);
  if (t.step_residuals.size() > 1) o << "\n  step residual " << num(t.step_residuals.back());
  if (!t.proximity_residuals.empty() && !std::isnan(t.proximity_residuals.back()))
    o << "\n  proximity residual " << num(t.proximity_residuals.back());
  if (t.post_residual) o << "\n  |g(U(final), final)| = " << num(*t.post_residual);
  if (t.unmatched) o << "\n  no proximal mate for " << to_string(*t.unmatched);
  return o.str();
}

void write_trace_csv(std::ostream& out, const Trace& t) {
  const std::size_t d = t.points.empty() ? 0 : t.points.front().dim();
  out << "step";
  for (std::size_t i = 1; i <= d; ++i) out << ",x" << i;
  out << ",step_residual,proximity_residual,apriori_bound\n";
  auto cell = [&](double v) {
    out << ',';
    if (!std::isnan(v)) out << num(v);
  };
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    out << k;
    for (std::size_t i = 0; i < d; ++i) out << ',' << num(t.points[k][i]);
    cell(t.step_residuals[k]);
    cell(t.proximity_residuals[k]);
    cell(t.apriori_bounds[k]);
    out << '\n';
  }
}

}  // namespace gspace
