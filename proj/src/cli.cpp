#include "chp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chp/analytics.hpp"
#include "chp/caseio.hpp"
#include "chp/cg.hpp"
#include "chp/milp.hpp"
#include "chp/ucbuild.hpp"

namespace chp::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitInputError = 2;

// Round a double through the 9-significant-digit text form so emitted
// summaries are byte-identical for identical inputs.
double sig9(double v) { return std::strtod(io::format_sig9(v).c_str(), nullptr); }

ordered_json prices_json(const UcInstance& inst, const PriceVector& pv) {
  ordered_json j;
  for (std::size_t c = 0; c < inst.constraints.size(); ++c) {
    ordered_json arr = ordered_json::array();
    for (int t = 0; t < inst.horizon; ++t) arr.push_back(sig9(pv.at(c, t)));
    j[inst.constraints[c].id] = std::move(arr);
  }
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_prices_csv(const fs::path& path, const UcInstance& inst,
                      const PriceVector& pv) {
  std::string csv = "hour,constraint,dual\n";
  for (int t = 0; t < inst.horizon; ++t)
    for (std::size_t c = 0; c < inst.constraints.size(); ++c)
      csv += std::to_string(t + 1) + "," + inst.constraints[c].id + "," +
             io::format_sig9(pv.at(c, t)) + "\n";
  write_file(path, csv);
}

void write_convergence_csv(const fs::path& path,
                           const std::vector<cg::CgIterationLog>& logs) {
  std::string csv = "iteration,rmp_objective,columns_added,wall_ms\n";
  for (const auto& log : logs)
    csv += std::to_string(log.iteration) + "," +
           io::format_sig9(log.rmp_objective) + "," +
           std::to_string(log.columns_added) + "," +
           io::format_sig9(log.wall_ms) + "\n";
  write_file(path, csv);
}

struct UcRun {
  analytics::UcSolutionView view;
  milp::MilpSolution solution;
};

UcRun solve_uc(const UcInstance& inst, double gap) {
  const auto prog = ucbuild::build_full_uc(inst);
  milp::MilpOptions opt;
  opt.gap_target = gap;
  UcRun run;
  run.solution = milp::solve_milp(prog.mip, opt);
  if (run.solution.status != milp::MilpStatus::optimal &&
      run.solution.status != milp::MilpStatus::gap_limit)
    throw std::runtime_error(std::string("UC solve failed: ") +
                             milp::to_string(run.solution.status));
  run.view.objective = run.solution.objective;
  for (std::size_t i = 0; i < inst.units.size(); ++i)
    run.view.schedules.push_back(ucbuild::extract_schedule(
        inst, static_cast<int>(i), prog.layout, run.solution.primal));
  return run;
}

std::vector<double> parse_price_list(const std::string& csv, int expected) {
  std::vector<double> out;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ',')) {
    if (cur.empty()) continue;
    out.push_back(std::strtod(cur.c_str(), nullptr));
  }
  if (expected > 0 && static_cast<int>(out.size()) != expected)
    throw CLI::ValidationError("price list must have " +
                               std::to_string(expected) + " entries");
  return out;
}

struct CommonArgs {
  std::string case_path;
  std::string out_dir = ".";
  std::string init = "trivial";
  double gap = 1e-4;
  int max_iters = 500;
  bool parallel = false;
  long seed = 0;
  double tolerance = 1e-6;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_cg_flags = true) {
  cmd->add_option("--case", a.case_path, "case file (JSON)")->required();
  cmd->add_option("--out-dir", a.out_dir, "output directory");
  if (with_cg_flags) {
    cmd->add_option("--init", a.init, "column init: flat|warm|trivial");
    cmd->add_option("--gap", a.gap, "UC MILP gap target");
    cmd->add_option("--max-iters", a.max_iters, "iteration cap");
    cmd->add_flag("--parallel", a.parallel, "price subproblems in parallel");
    cmd->add_option("--tolerance", a.tolerance, "reduced-cost tolerance");
  }
  cmd->add_option("--seed", a.seed,
                  "random seed (reserved; current solvers are deterministic)");
}

struct ChOutputs {
  cg::ChResult result;
  UcRun uc;
};

ChOutputs run_ch(const UcInstance& inst, const CommonArgs& args) {
  ChOutputs out;
  out.uc = solve_uc(inst, args.gap);
  cg::CgConfig cfg;
  cfg.init_mode = cg::parse_init_mode(args.init);
  cfg.max_iterations = args.max_iters;
  cfg.parallel_subproblems = args.parallel;
  cfg.reduced_cost_tolerance = args.tolerance;
  cg::WarmStart warm{out.uc.view.schedules, out.uc.view.objective};
  out.result = cg::run_cg(inst, cfg, &warm);
  return out;
}

ordered_json summary_header(const std::string& command, const UcInstance& inst,
                            const CommonArgs& args) {
  ordered_json j;
  j["command"] = command;
  j["case"] = inst.name;
  j["seed"] = args.seed;
  return j;
}

int cmd_validate(const CommonArgs& args) {
  const auto cf = io::load_case(args.case_path);
  std::cout << "OK: " << cf.instance.name << " (" << cf.instance.units.size()
            << " units, " << cf.instance.constraints.size() << " constraints, "
            << cf.instance.horizon << " hours)\n";
  return kExitOk;
}

int cmd_solve_uc(const CommonArgs& args) {
  const auto cf = io::load_case(args.case_path);
  const auto run = solve_uc(cf.instance, args.gap);
  fs::create_directories(args.out_dir);

  ordered_json j = summary_header("solve-uc", cf.instance, args);
  j["status"] = milp::to_string(run.solution.status);
  j["objective"] = sig9(run.solution.objective);
  j["bound"] = sig9(run.solution.bound);
  j["gap"] = sig9(run.solution.gap);
  j["nodes"] = run.solution.nodes;
  ordered_json sched = ordered_json::array();
  for (const auto& s : run.view.schedules) {
    ordered_json sj;
    sj["unit"] = s.unit_id;
    ordered_json power = ordered_json::array();
    for (double p : s.power) power.push_back(sig9(p));
    sj["power"] = std::move(power);
    ordered_json reserve = ordered_json::array();
    for (double r : s.reserve) reserve.push_back(sig9(r));
    sj["reserve"] = std::move(reserve);
    ordered_json on = ordered_json::array();
    for (bool b : s.on) on.push_back(b);
    sj["on"] = std::move(on);
    sj["cost"] = sig9(s.cost);
    sched.push_back(std::move(sj));
  }
  j["schedules"] = std::move(sched);
  write_file(fs::path(args.out_dir) / "uc.json", j.dump(2) + "\n");
  std::cout << "UC objective " << io::format_sig9(run.solution.objective)
            << " (" << milp::to_string(run.solution.status) << ", "
            << run.solution.nodes << " nodes)\n";
  return kExitOk;
}

int cmd_price_ir(const CommonArgs& args) {
  const auto cf = io::load_case(args.case_path);
  const auto prog = ucbuild::build_integer_relaxation(cf.instance);
  const auto sol = lp::solve_lp(prog.mip.base);
  if (sol.status != lp::LpStatus::optimal) {
    std::cerr << "integer relaxation not optimal: " << lp::to_string(sol.status)
              << "\n";
    return kExitNoConvergence;
  }
  PriceVector pv;
  pv.by_constraint.resize(cf.instance.constraints.size());
  for (std::size_t c = 0; c < cf.instance.constraints.size(); ++c)
    for (int row : prog.system_rows[c])
      pv.by_constraint[c].push_back(sol.duals[row]);

  fs::create_directories(args.out_dir);
  write_prices_csv(fs::path(args.out_dir) / "prices.csv", cf.instance, pv);
  ordered_json j = summary_header("price-ir", cf.instance, args);
  j["ir_objective"] = sig9(sol.objective);
  j["prices"] = prices_json(cf.instance, pv);
  write_file(fs::path(args.out_dir) / "summary.json", j.dump(2) + "\n");
  std::cout << "IR objective " << io::format_sig9(sol.objective) << "\n";
  return kExitOk;
}

int finish_ch(const UcInstance& inst, const CommonArgs& args,
              const std::string& command, const ChOutputs& out,
              bool with_uplift) {
  fs::create_directories(args.out_dir);
  const auto& res = out.result;
  write_prices_csv(fs::path(args.out_dir) / "prices.csv", inst, res.prices);
  write_convergence_csv(fs::path(args.out_dir) / "convergence.csv", res.logs);

  ordered_json j = summary_header(command, inst, args);
  j["init"] = args.init;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["g_star"] = sig9(res.rmp_objective);
  j["f_star"] = sig9(*res.uc_objective);
  j["duality_gap"] = sig9(*res.duality_gap);
  j["total_columns"] = res.pool ? res.pool->total_columns() : 0;
  j["prices"] = prices_json(inst, res.prices);

  if (with_uplift) {
    const auto report = analytics::uplift_report(inst, out.uc.view, res);
    ordered_json uj;
    ordered_json units = ordered_json::array();
    for (const auto& u : report.units)
      units.push_back({{"unit", u.unit_id},
                       {"market_profit", sig9(u.market_profit)},
                       {"self_profit", sig9(u.self_profit)},
                       {"loc", sig9(u.loc)}});
    uj["units"] = std::move(units);
    uj["total_loc"] = sig9(report.total_loc);
    uj["duality_gap"] = sig9(report.duality_gap);
    uj["prs"] = sig9(report.prs);
    uj["prices"] = prices_json(inst, report.prices);
    write_file(fs::path(args.out_dir) / "uplift.json", uj.dump(2) + "\n");
    j["total_loc"] = sig9(report.total_loc);
    j["prs"] = sig9(report.prs);
  }
  write_file(fs::path(args.out_dir) / "summary.json", j.dump(2) + "\n");

  std::cout << (res.converged ? "converged" : "NOT converged") << " in "
            << res.iterations << " iterations; g* = "
            << io::format_sig9(res.rmp_objective)
            << ", f* = " << io::format_sig9(*res.uc_objective) << ", gap = "
            << io::format_sig9(*res.duality_gap) << "\n";
  return res.converged ? kExitOk : kExitNoConvergence;
}

int cmd_price_ch(const CommonArgs& args, bool with_uplift) {
  const auto cf = io::load_case(args.case_path);
  const auto out = run_ch(cf.instance, args);
  return finish_ch(cf.instance, args, with_uplift ? "report" : "price-ch", out,
                   with_uplift);
}

struct SubgradientArgs {
  CommonArgs common;
  std::string rule = "c_over_k";
  double coeff = 1.0;
  int iterations = 1000;
  std::string start;
};

int cmd_subgradient(const SubgradientArgs& sa) {
  const auto cf = io::load_case(sa.common.case_path);
  analytics::SubgradientConfig cfg;
  if (sa.rule == "c_over_k")
    cfg.rule = analytics::SubgradientConfig::StepRule::coeff_over_k;
  else if (sa.rule == "c_over_sqrt_k")
    cfg.rule = analytics::SubgradientConfig::StepRule::coeff_over_sqrt_k;
  else if (sa.rule == "constant")
    cfg.rule = analytics::SubgradientConfig::StepRule::constant;
  else
    throw CLI::ValidationError(
        "--step-rule must be c_over_k|c_over_sqrt_k|constant");
  cfg.coefficient = sa.coeff;
  cfg.iterations = sa.iterations;
  cfg.initial_prices = sa.start.empty()
                           ? std::vector<double>(cf.instance.horizon, 0.0)
                           : parse_price_list(sa.start, cf.instance.horizon);
  const auto res = analytics::run_subgradient(cf.instance, cfg);

  fs::create_directories(sa.common.out_dir);
  std::string csv = "iteration,dual_value\n";
  for (std::size_t k = 0; k < res.values.size(); ++k)
    csv += std::to_string(k + 1) + "," + io::format_sig9(res.values[k]) + "\n";
  write_file(fs::path(sa.common.out_dir) / "subgradient.csv", csv);

  ordered_json j = summary_header("price-subgradient", cf.instance, sa.common);
  j["step_rule"] = sa.rule;
  j["step_coefficient"] = sig9(sa.coeff);
  j["iterations"] = sa.iterations;
  j["best_value"] = sig9(res.best_value);
  j["best_iteration"] = res.best_iteration;
  ordered_json best = ordered_json::array(), fin = ordered_json::array();
  for (double v : res.best_prices) best.push_back(sig9(v));
  for (double v : res.final_prices) fin.push_back(sig9(v));
  j["best_prices"] = std::move(best);
  j["final_prices"] = std::move(fin);
  write_file(fs::path(sa.common.out_dir) / "summary.json", j.dump(2) + "\n");
  std::cout << "best dual value " << io::format_sig9(res.best_value)
            << " at iteration " << res.best_iteration << "\n";
  return kExitOk;
}

struct SweepArgs {
  CommonArgs common;
  int hour = 0;  // 1-based; 0 means the last hour
  double from = 0.0, to = 0.0, step = 1.0;
  std::string base;
};

int cmd_sweep(const SweepArgs& sw) {
  const auto cf = io::load_case(sw.common.case_path);
  const int T = cf.instance.horizon;
  if (cf.instance.constraints.size() != 1)
    throw CLI::ValidationError("sweep-dual expects a single-balance case");
  const int hour = sw.hour == 0 ? T : sw.hour;
  if (hour < 1 || hour > T) throw CLI::ValidationError("--hour out of range");
  if (sw.step <= 0) throw CLI::ValidationError("--step must be positive");
  std::vector<double> base =
      sw.base.empty() ? std::vector<double>(T, 0.0)
                      : parse_price_list(sw.base, T);

  std::string csv = "lambda,dual_value\n";
  double best_l = base[hour - 1], best_q = -kInfinity;
  for (double l = sw.from; l <= sw.to + 1e-12; l += sw.step) {
    PriceVector pv;
    base[hour - 1] = l;
    pv.by_constraint = {base};
    const double q = analytics::evaluate_dual_function(cf.instance, pv);
    if (q > best_q) {
      best_q = q;
      best_l = l;
    }
    csv += io::format_sig9(l) + "," + io::format_sig9(q) + "\n";
  }
  fs::create_directories(sw.common.out_dir);
  write_file(fs::path(sw.common.out_dir) / "sweep.csv", csv);
  std::cout << "max q = " << io::format_sig9(best_q) << " at lambda = "
            << io::format_sig9(best_l) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "chpricer: exact convex-hull prices for unit-commitment markets via "
      "Dantzig-Wolfe column generation"};
  app.require_subcommand(1);

  CommonArgs validate_args, uc_args, ir_args, ch_args, report_args;
  SubgradientArgs sg_args;
  SweepArgs sweep_args;

  add_common(app.add_subcommand("validate", "check a case file"),
             validate_args, false);
  add_common(app.add_subcommand("solve-uc", "solve the UC MILP"), uc_args);
  add_common(app.add_subcommand("price-ir",
                                "integer-relaxation prices (baseline)"),
             ir_args, false);
  add_common(app.add_subcommand("price-ch", "exact CH prices via CG"), ch_args);
  add_common(app.add_subcommand("report", "CH prices plus uplift report"),
             report_args);

  auto* sg = app.add_subcommand("price-subgradient",
                                "sub-gradient baseline on the dual");
  add_common(sg, sg_args.common, false);
  sg->add_option("--step-rule", sg_args.rule,
                 "c_over_k|c_over_sqrt_k|constant");
  sg->add_option("--step-coeff", sg_args.coeff, "step coefficient c");
  sg->add_option("--iters", sg_args.iterations, "iteration count");
  sg->add_option("--start", sg_args.start, "initial prices, comma separated");

  auto* sw = app.add_subcommand("sweep-dual",
                                "tabulate q(lambda) along one hour's price");
  add_common(sw, sweep_args.common, false);
  sw->add_option("--hour", sweep_args.hour, "1-based hour (default: last)");
  sw->add_option("--from", sweep_args.from, "sweep start")->required();
  sw->add_option("--to", sweep_args.to, "sweep end")->required();
  sw->add_option("--step", sweep_args.step, "sweep increment");
  sw->add_option("--base", sweep_args.base, "fixed prices, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (app.got_subcommand("validate")) return cmd_validate(validate_args);
    if (app.got_subcommand("solve-uc")) return cmd_solve_uc(uc_args);
    if (app.got_subcommand("price-ir")) return cmd_price_ir(ir_args);
    if (app.got_subcommand("price-ch")) return cmd_price_ch(ch_args, false);
    if (app.got_subcommand("report")) return cmd_price_ch(report_args, true);
    if (app.got_subcommand("price-subgradient")) return cmd_subgradient(sg_args);
    if (app.got_subcommand("sweep-dual")) return cmd_sweep(sweep_args);
  } catch (const io::CaseParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const io::CaseVersionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const io::CaseValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const io::TabularError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  return kExitInputError;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.push_back("chpricer");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace chp::cli
