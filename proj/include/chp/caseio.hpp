#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chp/model.hpp"

// Case-file format (versioned JSON, designed to keep hand-written fixtures
// reviewable) and delimited-table import for bulk datasets. See
// docs/case-format.md.

namespace chp::io {

class CaseParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CaseVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CaseValidationError : public std::runtime_error {
 public:
  CaseValidationError(const std::string& what, std::vector<Violation> v = {})
      : std::runtime_error(what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// Optional reference values carried by fixture cases.
struct Expectations {
  std::map<std::string, std::vector<double>> ch_prices;  // constraint -> hourly
  std::optional<double> g_star;
  std::optional<double> f_star;
  std::optional<double> duality_gap;
  std::map<std::string, std::vector<double>> ir_prices;
  std::optional<double> ir_objective;
  std::map<std::string, double> loc;
  std::optional<double> prs;
  double tolerance = 1e-6;
};

struct CaseFile {
  UcInstance instance;
  std::optional<Expectations> expectations;
};

constexpr int kCaseSchemaVersion = 1;

CaseFile parse_case(const std::string& text);
CaseFile load_case(const std::string& path);
std::string emit_case(const CaseFile& c);
void save_case(const CaseFile& c, const std::string& path);

// --- Delimited-table import -------------------------------------------

// Canonical field names -> table headers. Optional fields fall back to
// `defaults`, then to built-in defaults. Block columns are addressed as
// block1_mw/block1_price, block2_mw, ... in the canonical namespace.
struct ColumnMapping {
  std::map<std::string, std::string> columns;
  std::map<std::string, double> defaults;
};

// The dataset adjustments; each is individually toggleable.
struct TabularAdjustments {
  bool halve_ramps = true;            // ramp_up, ramp_down /= 2
  bool startup_ramp_from_pmin = true; // startup_ramp = p_min + ramp_up/2
  bool shutdown_ramp_pmax = true;     // shutdown_ramp = p_max
  bool reserve_from_ramp = true;      // reserve_max = 30-minute ramp up
  bool default_min_times = true;      // blank min up/down -> 1 hour
  bool clear_initial_hours = true;    // forced initial hours -> 0
  bool start_online_at_pmin = true;   // every unit initially online at p_min
};

struct TabularOptions {
  ColumnMapping mapping;
  TabularAdjustments adjustments;
  std::vector<double> demand;                          // one entry per hour
  std::optional<std::vector<double>> reserve_requirement;
  double power_penalty = 1000.0;
  double reserve_penalty = 900.0;
};

class TabularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

UcInstance import_tabular_text(const std::string& text,
                               const TabularOptions& options);
UcInstance import_tabular(const std::string& path,
                          const TabularOptions& options);

ColumnMapping parse_mapping(const std::string& json_text);
ColumnMapping load_mapping(const std::string& path);

// 9-significant-digit float formatting shared by every emitted artifact.
std::string format_sig9(double v);

}  // namespace chp::io
