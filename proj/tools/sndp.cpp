// Command-line front end: solve, audit, apsp and gen.
//
// Exit codes: 0 success, 1 other error, 2 malformed input or usage,
// 3 unsatisfiable requirements, 4 internal invariant violation,
// 5 instance too large for the exact oracle.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sndp/instance_io.hpp"
#include "sndp/report.hpp"
#include "sndp/sndp.hpp"

namespace {

using sndp::report::json;

enum Exit : int {
  kOk = 0,
  kOther = 1,
  kMalformed = 2,
  kUnsatisfiable = 3,
  kInvariant = 4,
  kTooLarge = 5,
};

// Bad input that is not an instance file: missing files, config, options.
class UsageError : public sndp::Error {
 public:
  using Error::Error;
};

struct SolveFlags {
  std::string path;
  bool improve = true;
  std::optional<std::string> cost_model;
  std::optional<unsigned> kappa;
  std::optional<unsigned> b;
  std::string config_path;
  std::string out;
  bool trace = false;
  std::int64_t max_weight = 1 << 20;
};

sndp::CostModelKind cost_model_kind(const std::string& name) {
  try {
    return sndp::parse_cost_model(name);
  } catch (const sndp::Error& e) {
    throw UsageError(e.what());
  }
}

sndp::Instance load(const std::string& path, std::int64_t max_weight) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return sndp::validate_instance(sndp::parse_instance(in), max_weight);
}

// Config file keys: apsp.cost_model, apsp.kappa, solver.improve,
// solver.bandwidth_b, solver.path_limit. Command-line flags win.
sndp::SolverConfig solver_config(const SolveFlags& f) {
  sndp::SolverConfig cfg;
  cfg.improve = f.improve;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw UsageError("cannot open config " + f.config_path);
    nlohmann::json c;
    try {
      c = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    try {
      if (c.contains("apsp")) {
        const auto& a = c["apsp"];
        if (a.contains("cost_model")) cfg.cost_model.kind = cost_model_kind(a["cost_model"].get<std::string>());
        if (a.contains("kappa")) cfg.cost_model.kappa = a["kappa"].get<unsigned>();
      }
      if (c.contains("solver")) {
        const auto& s = c["solver"];
        if (s.contains("improve")) cfg.improve = s["improve"].get<bool>();
        if (s.contains("bandwidth_b")) cfg.b = s["bandwidth_b"].get<unsigned>();
        if (s.contains("path_limit")) cfg.path_limit = s["path_limit"].get<std::size_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
  if (f.cost_model) cfg.cost_model.kind = cost_model_kind(*f.cost_model);
  if (f.kappa) cfg.cost_model.kappa = *f.kappa;
  if (f.b) cfg.b = *f.b;
  cfg.cost_model.b = cfg.b;
  return cfg;
}

void emit(const json& report, const std::string& out) {
  const auto text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw sndp::Error("cannot write " + out);
  f << text;
}

int cmd_solve(const SolveFlags& f) {
  const auto inst = load(f.path, f.max_weight);
  const auto cfg = solver_config(f);
  const auto res = sndp::solve(inst, cfg);
  if (!sndp::verify_sndp_feasible(res.solution, inst)) throw sndp::InvariantViolation("solver output is infeasible");
  emit(sndp::report::solve_report(inst, res, cfg, f.trace), f.out);
  return kOk;
}

int cmd_audit(const SolveFlags& f, std::optional<std::uint32_t> cap) {
  const auto inst = load(f.path, f.max_weight);
  const auto cfg = solver_config(f);
  const auto exact = sndp::exact_sndp(inst, cap);
  const auto res = sndp::solve(inst, cfg);
  const auto a = sndp::audit(inst, res.solution, exact);
  auto report = sndp::report::solve_report(inst, res, cfg, f.trace);
  report["command"] = "audit";
  report["audit"] = sndp::report::audit_block(a, exact);
  emit(report, f.out);
  return kOk;
}

int cmd_apsp(const std::string& path, unsigned b, std::int64_t max_weight, const std::string& out) {
  const auto inst = load(path, max_weight);
  auto net = sndp::init_network(inst, sndp::EngineConfig{b, 0});
  emit(sndp::report::apsp_report(inst, sndp::apsp_with_routing(net)), out);
  return kOk;
}

int cmd_gen(const sndp::GeneratorOptions& opt, const std::string& out) {
  std::ostringstream text;
  sndp::write_instance(text, sndp::generate_instance(opt));
  if (out.empty()) {
    std::cout << text.str();
    return kOk;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw sndp::Error("cannot write " + out);
  f << text.str();
  return kOk;
}

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("instance", f.path, "instance file")->required();
  cmd->add_flag("--improve,!--no-improve", f.improve, "run local improvement (default on)");
  cmd->add_option("--cost-model", f.cost_model, "honest, classical_cited or quantum_cited");
  cmd->add_option("--kappa", f.kappa, "polylog exponent of the cited cost models");
  cmd->add_option("--bandwidth-b", f.b, "bandwidth multiplier b in B = b * ceil(log2 n)");
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_flag("--trace", f.trace, "include per-level trace");
  cmd->add_option("--max-weight", f.max_weight, "largest accepted edge weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed survivable network design on a simulated congested clique"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "run the distributed heuristic");
  add_solver_flags(solve, solve_flags);

  SolveFlags audit_flags;
  std::optional<std::uint32_t> cap;
  auto* audit = app.add_subcommand("audit", "solve and compare against the exact optimum");
  add_solver_flags(audit, audit_flags);
  audit->add_option("--cap", cap, "multiplicity cap for the exact search");

  std::string apsp_path, apsp_out;
  unsigned apsp_b = 3;
  std::int64_t apsp_max_weight = 1 << 20;
  auto* apsp = app.add_subcommand("apsp", "dump distances and routing tables");
  apsp->add_option("instance", apsp_path, "instance file")->required();
  apsp->add_option("--bandwidth-b", apsp_b, "bandwidth multiplier b");
  apsp->add_option("--max-weight", apsp_max_weight, "largest accepted edge weight");
  apsp->add_option("--out", apsp_out, "write the report here instead of stdout");

  sndp::GeneratorOptions gen_opt;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a random connected instance");
  gen->add_option("--n", gen_opt.n, "node count")->required();
  gen->add_option("--density", gen_opt.density, "edge probability in (0, 1]");
  gen->add_option("--rmax", gen_opt.rmax, "largest requirement");
  gen->add_option("--seed", gen_opt.seed, "random seed");
  gen->add_option("--max-weight", gen_opt.max_weight, "largest edge weight");
  gen->add_option("--min-weight", gen_opt.min_weight, "smallest edge weight");
  gen->add_option("--out", gen_out, "write the instance here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*solve) return cmd_solve(solve_flags);
    if (*audit) return cmd_audit(audit_flags, cap);
    if (*apsp) return cmd_apsp(apsp_path, apsp_b, apsp_max_weight, apsp_out);
    if (*gen) return cmd_gen(gen_opt, gen_out);
  } catch (const sndp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const sndp::InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == sndp::InstanceErrc::kRequirementUnsatisfiable ? kUnsatisfiable : kMalformed;
  } catch (const sndp::InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  } catch (const sndp::SearchSpaceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTooLarge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
