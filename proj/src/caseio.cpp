#include "chp/caseio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace chp::io {

using nlohmann::ordered_json;

std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double num_at(const ordered_json& j, const std::string& key, double dflt,
              const std::string& ctx) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number())
    throw CaseValidationError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

double req_num(const ordered_json& j, const std::string& key,
               const std::string& ctx) {
  if (!j.contains(key))
    throw CaseValidationError(ctx + "." + key + ": required field missing");
  if (!j[key].is_number())
    throw CaseValidationError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

bool bool_at(const ordered_json& j, const std::string& key, bool dflt,
             const std::string& ctx) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean())
    throw CaseValidationError(ctx + "." + key + ": expected a boolean");
  return j[key].get<bool>();
}

std::string str_at(const ordered_json& j, const std::string& key,
                   const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_string())
    throw CaseValidationError(ctx + "." + key + ": required string missing");
  return j[key].get<std::string>();
}

std::vector<double> vec_at(const ordered_json& j, const std::string& key,
                           const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_array())
    throw CaseValidationError(ctx + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number())
      throw CaseValidationError(ctx + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

UnitSpec parse_unit(const ordered_json& j, int index) {
  const std::string ctx = "units[" + std::to_string(index) + "]";
  if (!j.is_object()) throw CaseValidationError(ctx + ": expected an object");
  UnitSpec u;
  u.id = str_at(j, "id", ctx);
  u.p_max = req_num(j, "p_max", ctx);
  u.p_min = num_at(j, "p_min", 0.0, ctx);
  if (j.contains("blocks")) {
    if (!j["blocks"].is_array())
      throw CaseValidationError(ctx + ".blocks: expected an array");
    int b = 0;
    for (const auto& bj : j["blocks"]) {
      const std::string bctx = ctx + ".blocks[" + std::to_string(b++) + "]";
      BlockOffer offer;
      offer.max_quantity = req_num(bj, "max_quantity", bctx);
      offer.price = req_num(bj, "price", bctx);
      u.blocks.push_back(offer);
    }
  }
  u.no_load_cost = num_at(j, "no_load_cost", 0.0, ctx);
  u.startup_cost = num_at(j, "startup_cost", 0.0, ctx);
  u.shutdown_cost = num_at(j, "shutdown_cost", 0.0, ctx);
  u.reserve_offer_price = num_at(j, "reserve_offer_price", 0.0, ctx);
  u.reserve_max = num_at(j, "reserve_max", 0.0, ctx);
  // Omitted rates mean "no limit"; p_max never binds as a rate.
  u.ramp_up = num_at(j, "ramp_up", u.p_max, ctx);
  u.ramp_down = num_at(j, "ramp_down", u.p_max, ctx);
  u.startup_ramp = num_at(j, "startup_ramp", u.p_max, ctx);
  u.shutdown_ramp = num_at(j, "shutdown_ramp", u.p_max, ctx);
  u.min_up_time = static_cast<int>(num_at(j, "min_up_time", 1, ctx));
  u.min_down_time = static_cast<int>(num_at(j, "min_down_time", 1, ctx));
  u.init_online = bool_at(j, "init_online", false, ctx);
  u.init_power = num_at(j, "init_power", 0.0, ctx);
  u.forced_hours_online =
      static_cast<int>(num_at(j, "forced_hours_online", 0, ctx));
  u.forced_hours_offline =
      static_cast<int>(num_at(j, "forced_hours_offline", 0, ctx));
  u.must_run = bool_at(j, "must_run", false, ctx);
  u.single_block_commitment =
      bool_at(j, "single_block_commitment", false, ctx);
  return u;
}

ConstraintSense parse_sense(const std::string& s, const std::string& ctx) {
  if (s == "eq") return ConstraintSense::equality;
  if (s == "le") return ConstraintSense::less_equal;
  if (s == "ge") return ConstraintSense::greater_equal;
  throw CaseValidationError(ctx + ".sense: expected eq|le|ge, got '" + s + "'");
}

SystemConstraintSpec parse_constraint(const ordered_json& j, int index) {
  const std::string ctx = "constraints[" + std::to_string(index) + "]";
  if (!j.is_object()) throw CaseValidationError(ctx + ": expected an object");
  SystemConstraintSpec c;
  c.id = str_at(j, "id", ctx);
  c.sense = j.contains("sense") ? parse_sense(str_at(j, "sense", ctx), ctx)
                                : ConstraintSense::equality;
  c.rhs = vec_at(j, "rhs", ctx);
  if (j.contains("coefficients")) {
    if (!j["coefficients"].is_array())
      throw CaseValidationError(ctx + ".coefficients: expected an array");
    int k = 0;
    for (const auto& cj : j["coefficients"]) {
      const std::string cctx = ctx + ".coefficients[" + std::to_string(k++) + "]";
      ConstraintCoefficient coef;
      coef.unit_id = str_at(cj, "unit", cctx);
      const std::string product =
          cj.contains("product") ? str_at(cj, "product", cctx) : "power";
      if (product == "power")
        coef.product = Product::power;
      else if (product == "reserve")
        coef.product = Product::reserve;
      else
        throw CaseValidationError(cctx + ".product: expected power|reserve");
      coef.value = num_at(cj, "value", 1.0, cctx);
      c.coefficients.push_back(coef);
    }
  }
  c.slack_penalty = num_at(j, "slack_penalty", 0.0, ctx);
  c.slack_allowed = bool_at(j, "slack_allowed", false, ctx);
  c.power_balance = bool_at(j, "power_balance", false, ctx);
  return c;
}

Expectations parse_expectations(const ordered_json& j) {
  const std::string ctx = "expectations";
  Expectations e;
  if (j.contains("ch_prices")) {
    for (const auto& [key, val] : j["ch_prices"].items()) {
      std::vector<double> v;
      for (const auto& x : val) v.push_back(x.get<double>());
      e.ch_prices[key] = std::move(v);
    }
  }
  if (j.contains("g_star")) e.g_star = req_num(j, "g_star", ctx);
  if (j.contains("f_star")) e.f_star = req_num(j, "f_star", ctx);
  if (j.contains("duality_gap")) e.duality_gap = req_num(j, "duality_gap", ctx);
  if (j.contains("ir_prices")) {
    for (const auto& [key, val] : j["ir_prices"].items()) {
      std::vector<double> v;
      for (const auto& x : val) v.push_back(x.get<double>());
      e.ir_prices[key] = std::move(v);
    }
  }
  if (j.contains("ir_objective")) e.ir_objective = req_num(j, "ir_objective", ctx);
  if (j.contains("loc"))
    for (const auto& [key, val] : j["loc"].items())
      e.loc[key] = val.get<double>();
  if (j.contains("prs")) e.prs = req_num(j, "prs", ctx);
  e.tolerance = num_at(j, "tolerance", 1e-6, ctx);
  return e;
}

ordered_json unit_to_json(const UnitSpec& u) {
  ordered_json j;
  j["id"] = u.id;
  j["p_min"] = u.p_min;
  j["p_max"] = u.p_max;
  j["blocks"] = ordered_json::array();
  for (const auto& b : u.blocks)
    j["blocks"].push_back({{"max_quantity", b.max_quantity}, {"price", b.price}});
  j["no_load_cost"] = u.no_load_cost;
  j["startup_cost"] = u.startup_cost;
  j["shutdown_cost"] = u.shutdown_cost;
  j["reserve_offer_price"] = u.reserve_offer_price;
  j["reserve_max"] = u.reserve_max;
  j["ramp_up"] = u.ramp_up;
  j["ramp_down"] = u.ramp_down;
  j["startup_ramp"] = u.startup_ramp;
  j["shutdown_ramp"] = u.shutdown_ramp;
  j["min_up_time"] = u.min_up_time;
  j["min_down_time"] = u.min_down_time;
  j["init_online"] = u.init_online;
  j["init_power"] = u.init_power;
  j["forced_hours_online"] = u.forced_hours_online;
  j["forced_hours_offline"] = u.forced_hours_offline;
  j["must_run"] = u.must_run;
  j["single_block_commitment"] = u.single_block_commitment;
  return j;
}

ordered_json constraint_to_json(const SystemConstraintSpec& c) {
  ordered_json j;
  j["id"] = c.id;
  j["sense"] = c.sense == ConstraintSense::equality      ? "eq"
               : c.sense == ConstraintSense::less_equal ? "le"
                                                         : "ge";
  j["rhs"] = c.rhs;
  j["coefficients"] = ordered_json::array();
  for (const auto& coef : c.coefficients)
    j["coefficients"].push_back(
        {{"unit", coef.unit_id},
         {"product", coef.product == Product::power ? "power" : "reserve"},
         {"value", coef.value}});
  j["slack_penalty"] = c.slack_penalty;
  j["slack_allowed"] = c.slack_allowed;
  j["power_balance"] = c.power_balance;
  return j;
}

}  // namespace

CaseFile parse_case(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CaseParseError(std::string("case parse error: ") + e.what());
  }
  if (!j.is_object()) throw CaseParseError("case file must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw CaseVersionError("missing schema_version");
  const int version = j["schema_version"].get<int>();
  if (version != kCaseSchemaVersion)
    throw CaseVersionError("unsupported schema_version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kCaseSchemaVersion) + ")");

  CaseFile cf;
  cf.instance.name = j.contains("name") ? str_at(j, "name", "case") : "";
  cf.instance.horizon = static_cast<int>(req_num(j, "horizon", "case"));
  if (!j.contains("units") || !j["units"].is_array())
    throw CaseValidationError("units: expected an array");
  int i = 0;
  for (const auto& uj : j["units"]) cf.instance.units.push_back(parse_unit(uj, i++));
  if (cf.instance.units.empty())
    throw CaseValidationError("units: at least one unit is required");
  if (!j.contains("constraints") || !j["constraints"].is_array())
    throw CaseValidationError("constraints: expected an array");
  i = 0;
  for (const auto& cj : j["constraints"])
    cf.instance.constraints.push_back(parse_constraint(cj, i++));
  if (j.contains("expectations"))
    cf.expectations = parse_expectations(j["expectations"]);

  const auto violations = validate_instance(cf.instance);
  if (!violations.empty()) {
    std::string what = "case failed validation:";
    for (const auto& v : violations) what += "\n  " + v.to_string();
    throw CaseValidationError(what, violations);
  }
  return cf;
}

CaseFile load_case(const std::string& path) { return parse_case(read_file(path)); }

std::string emit_case(const CaseFile& c) {
  ordered_json j;
  j["schema_version"] = kCaseSchemaVersion;
  j["name"] = c.instance.name;
  j["horizon"] = c.instance.horizon;
  j["units"] = ordered_json::array();
  for (const auto& u : c.instance.units) j["units"].push_back(unit_to_json(u));
  j["constraints"] = ordered_json::array();
  for (const auto& con : c.instance.constraints)
    j["constraints"].push_back(constraint_to_json(con));
  if (c.expectations) {
    const auto& e = *c.expectations;
    ordered_json ej;
    if (!e.ch_prices.empty()) ej["ch_prices"] = e.ch_prices;
    if (e.g_star) ej["g_star"] = *e.g_star;
    if (e.f_star) ej["f_star"] = *e.f_star;
    if (e.duality_gap) ej["duality_gap"] = *e.duality_gap;
    if (!e.ir_prices.empty()) ej["ir_prices"] = e.ir_prices;
    if (e.ir_objective) ej["ir_objective"] = *e.ir_objective;
    if (!e.loc.empty()) ej["loc"] = e.loc;
    if (e.prs) ej["prs"] = *e.prs;
    ej["tolerance"] = e.tolerance;
    j["expectations"] = std::move(ej);
  }
  return j.dump(2) + "\n";
}

void save_case(const CaseFile& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CaseParseError("cannot write file: " + path);
  out << emit_case(c);
}

// --- Tabular import ------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.pop_back();
  }
  return out;
}

char sniff_delimiter(const std::string& header) {
  for (char c : {',', '\t', ';'})
    if (header.find(c) != std::string::npos) return c;
  return ',';
}

}  // namespace

ColumnMapping parse_mapping(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TabularError(std::string("mapping parse error: ") + e.what());
  }
  ColumnMapping m;
  if (j.contains("columns"))
    for (const auto& [key, val] : j["columns"].items())
      m.columns[key] = val.get<std::string>();
  if (j.contains("defaults"))
    for (const auto& [key, val] : j["defaults"].items())
      m.defaults[key] = val.get<double>();
  return m;
}

ColumnMapping load_mapping(const std::string& path) {
  return parse_mapping(read_file(path));
}

UcInstance import_tabular_text(const std::string& text,
                               const TabularOptions& options) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header))
    throw TabularError("empty table: no header row");
  const char delim = sniff_delimiter(header);
  const auto headers = split_line(header, delim);
  std::map<std::string, int> column_of;
  for (std::size_t i = 0; i < headers.size(); ++i)
    column_of[headers[i]] = static_cast<int>(i);

  const auto& mapping = options.mapping;
  auto mapped_col = [&](const std::string& field) -> int {
    const auto it = mapping.columns.find(field);
    if (it == mapping.columns.end()) return -1;
    const auto hit = column_of.find(it->second);
    if (hit == column_of.end())
      throw TabularError("mapped column '" + it->second + "' for field '" +
                         field + "' not present in the table header");
    return hit->second;
  };
  if (mapped_col("id") < 0)
    throw TabularError("required field 'id' is not mapped");
  if (mapped_col("p_max") < 0)
    throw TabularError("required field 'p_max' is not mapped");

  UcInstance inst;
  inst.name = "imported";
  inst.horizon = static_cast<int>(options.demand.size());
  if (inst.horizon <= 0)
    throw TabularError("demand profile must define the horizon");

  std::string line;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || split_line(line, delim).empty()) continue;
    const auto cells = split_line(line, delim);
    bool blank = true;
    for (const auto& c : cells)
      if (!c.empty()) blank = false;
    if (blank) continue;

    auto cell = [&](int col) -> std::string {
      if (col < 0 || col >= static_cast<int>(cells.size())) return "";
      return cells[col];
    };
    auto number = [&](const std::string& field, double builtin,
                      bool* was_blank = nullptr) -> double {
      const int col = mapped_col(field);
      std::string raw = col >= 0 ? cell(col) : "";
      if (raw.empty()) {
        if (was_blank) *was_blank = true;
        const auto it = mapping.defaults.find(field);
        return it != mapping.defaults.end() ? it->second : builtin;
      }
      char* end = nullptr;
      const double v = std::strtod(raw.c_str(), &end);
      if (end == raw.c_str() || *end != '\0')
        throw TabularError("non-numeric cell '" + raw + "' at row " +
                           std::to_string(row_no) + ", column '" +
                           mapping.columns.at(field) + "'");
      return v;
    };

    UnitSpec u;
    u.id = cell(mapped_col("id"));
    if (u.id.empty())
      throw TabularError("blank unit id at row " + std::to_string(row_no));
    u.p_max = number("p_max", 0.0);
    u.p_min = number("p_min", 0.0);
    for (int b = 1;; ++b) {
      const std::string mw = "block" + std::to_string(b) + "_mw";
      const std::string pr = "block" + std::to_string(b) + "_price";
      if (mapped_col(mw) < 0) break;
      const double q = number(mw, 0.0);
      if (q <= 0.0) break;
      u.blocks.push_back({q, number(pr, 0.0)});
    }
    if (u.blocks.empty()) u.blocks.push_back({u.p_max, number("energy_price", 0.0)});
    u.no_load_cost = number("no_load_cost", 0.0);
    u.startup_cost = number("startup_cost", 0.0);
    u.shutdown_cost = number("shutdown_cost", 0.0);
    u.reserve_offer_price = number("reserve_price", 0.0);
    u.ramp_up = number("ramp_up", u.p_max);
    u.ramp_down = number("ramp_down", u.ramp_up);
    u.startup_ramp = number("startup_ramp", u.p_max);
    u.shutdown_ramp = number("shutdown_ramp", u.p_max);
    u.reserve_max = number("reserve_max", 0.0);

    bool mut_blank = false, mdt_blank = false;
    double mut = number("min_up", 1.0, &mut_blank);
    double mdt = number("min_down", 1.0, &mdt_blank);
    const auto& adj = options.adjustments;
    if (adj.default_min_times) {
      if (mut_blank || mut <= 0) mut = 1;
      if (mdt_blank || mdt <= 0) mdt = 1;
    }
    u.min_up_time = std::max(1, static_cast<int>(mut));
    u.min_down_time = std::max(1, static_cast<int>(mdt));

    if (adj.halve_ramps) {
      u.ramp_up /= 2;
      u.ramp_down /= 2;
    }
    if (adj.startup_ramp_from_pmin) u.startup_ramp = u.p_min + u.ramp_up / 2;
    if (adj.shutdown_ramp_pmax) u.shutdown_ramp = u.p_max;
    if (adj.reserve_from_ramp) u.reserve_max = u.ramp_up / 2;
    if (adj.clear_initial_hours) {
      u.forced_hours_online = 0;
      u.forced_hours_offline = 0;
    } else {
      u.forced_hours_online = static_cast<int>(number("init_hours_online", 0.0));
      u.forced_hours_offline = static_cast<int>(number("init_hours_offline", 0.0));
    }
    if (adj.start_online_at_pmin) {
      u.init_online = true;
      u.init_power = u.p_min;
    } else {
      u.init_online = number("init_online", 0.0) > 0.5;
      u.init_power = number("init_power", 0.0);
    }
    inst.units.push_back(std::move(u));
  }
  if (inst.units.empty()) throw TabularError("table has no unit rows");

  SystemConstraintSpec bal;
  bal.id = "balance";
  bal.sense = ConstraintSense::equality;
  bal.rhs = options.demand;
  bal.slack_penalty = options.power_penalty;
  bal.slack_allowed = true;
  bal.power_balance = true;
  for (const auto& u : inst.units)
    bal.coefficients.push_back({u.id, Product::power, 1.0});
  inst.constraints.push_back(std::move(bal));

  if (options.reserve_requirement) {
    if (static_cast<int>(options.reserve_requirement->size()) != inst.horizon)
      throw TabularError("reserve requirement length does not match demand");
    SystemConstraintSpec res;
    res.id = "reserve";
    res.sense = ConstraintSense::greater_equal;
    res.rhs = *options.reserve_requirement;
    res.slack_penalty = options.reserve_penalty;
    res.slack_allowed = true;
    for (const auto& u : inst.units)
      res.coefficients.push_back({u.id, Product::reserve, 1.0});
    inst.constraints.push_back(std::move(res));
  }

  const auto violations = validate_instance(inst);
  if (!violations.empty()) {
    std::string what = "imported instance failed validation:";
    for (const auto& v : violations) what += "\n  " + v.to_string();
    throw CaseValidationError(what, violations);
  }
  return inst;
}

UcInstance import_tabular(const std::string& path,
                          const TabularOptions& options) {
  return import_tabular_text(read_file(path), options);
}

}  // namespace chp::io
