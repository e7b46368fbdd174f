#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gspace::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kError = 2;

struct CommonOptions {
  std::string config;  // path, or the name of a shipped fixture
  std::optional<double> tol_prox;
  std::optional<double> tol_zero;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_tuples;
  bool json = false;
  std::string out;
};

struct VerifyOptions {
  CommonOptions common;
  std::vector<std::string> checks;  // kind[:function][:key=value...]
  std::string replay;               // role=(..);role=(..)
};

struct SolveOptions {
  CommonOptions common;
  std::string scheme;  // picard | power | proximal | berinde
  std::string function = "g";
  std::string map;
  std::string from;
  std::optional<double> alpha;
  int n0 = 1;
  std::optional<std::size_t> stages;
  double n_cap = 0.0;
  int max_iter = 10'000;
  bool skip_side_condition = false;
  std::string trace;
  std::string a = "A";
  std::string b = "B";
};

struct SearchOptions {
  CommonOptions common;
  std::string check;
  double from = 0.05;
  double to = 1.0;
  std::size_t count = 20;
};

struct FixturesOptions {
  std::string pattern = "*";
  std::string dir;
  bool json = false;
};

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_search(const SearchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fixtures(const FixturesOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace gspace::cli
