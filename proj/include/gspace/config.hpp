#pragma once

// Instance documents (JSON). Layout:
//
//   name, dimension, g                      required
//   functions   {"h": expr, ...}             extra bivariate functions
//   sets        {"A": {"boxes": [{"lo", "hi", "resolution"}], "extra": [pt...]}
//               |{"points": [pt...], "labels": [...]}, "membership_tol"}
//   maps        {"f": {"exprs": [...] | "table": [[pt, pt], ...], "domain", "codomain"}}
//   convex      {"exprs": [...], "r": pt, "s": pt}
//   tolerances  {"eps_prox", "eps_zero", "eps_ineq", "tail_len"}
//   scan        {"max_tuples", "seed"}
//   schedule    {"rule": "harmonic", "stages": K} | {"values": [...]}
//   sequences   {"xn": {"exprs": [...] over n, "length": L} | {"points": [pt...]}}
//   lambda_grid count | [values]
//   expectations (fixtures only; kept verbatim)
//
// A point is a number array, a bare number (d = 1) or a string such as "(0,1/2)".

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "gspace/solvers.hpp"
#include "gspace/space.hpp"

namespace gspace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string location, const std::string& message)
      : std::runtime_error((location.empty() ? std::string("config") : location) + ": " + message),
        location_(std::move(location)),
        message_(message) {}
  const std::string& location() const noexcept { return location_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string location_;
  std::string message_;
};

struct Instance {
  std::string name;
  std::uint32_t dim = 0;
  std::map<std::string, GFunction> functions;  // always holds "g"
  std::map<std::string, std::shared_ptr<const SampleSet>> sets;
  std::map<std::string, MapSpec> maps;
  std::optional<ConvexStructure> convex;
  std::optional<Point> r;
  std::optional<Point> s;
  ToleranceSet tol;
  ScanPolicy policy;
  std::optional<Schedule> schedule;
  std::map<std::string, SequencePrefix> sequences;
  std::vector<double> lambda_grid;
  json expectations = json::array();
  json canonical;  // normalised document: what serialize() returns

  const GFunction& function(const std::string& name) const;
  const SampleSet& set(const std::string& name) const;
  std::shared_ptr<const SampleSet> set_ptr(const std::string& name) const;
  const MapSpec& map(const std::string& name) const;
  const SequencePrefix& sequence(const std::string& name) const;
  const ConvexStructure& convex_structure() const;
};

Instance load_instance(const json& doc);
Instance load_instance_file(const std::filesystem::path& path);
json serialize(const Instance& inst);

// Same canonical document and same expanded sample points.
bool equivalent(const Instance& a, const Instance& b);

// Reads a point in any of the accepted JSON forms.
Point point_from_json(const json& j, std::size_t dim, const std::string& where);
json point_to_json(const Point& p);

}  // namespace gspace
