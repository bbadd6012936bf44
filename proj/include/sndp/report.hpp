#pragma once

// JSON reports for the command-line front end. Node ids are 1-based here.

#include <string>
#include <vector>

#include <json.hpp>

#include "sndp/apsp.hpp"
#include "sndp/oracle.hpp"
#include "sndp/solver.hpp"

namespace sndp::report {

using json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

inline json stats(const RoundStats& s) {
  return {{"rounds", s.rounds},
          {"messages", s.messages},
          {"total_bits", s.total_bits},
          {"max_message_bits", s.max_message_bits},
          {"bandwidth_B", s.bandwidth_bits}};
}

inline json edge_pair(const EdgeKey& k) { return json::array({k.first + 1, k.second + 1}); }

inline json instance_summary(const Instance& inst) {
  json r = json::array();
  for (auto x : inst.requirements()) r.push_back(x);
  const auto lv = levels_from_requirements(inst.requirements());
  return {{"n", inst.node_count()},
          {"m", inst.edge_count()},
          {"weight_cap", inst.max_weight()},
          {"requirements", r},
          {"levels", lv.levels}};
}

inline json multigraph(const Multigraph& s, const Instance& inst) {
  json edges = json::array();
  for (std::size_t e = 0; e < s.size(); ++e) {
    if (s.copies(e) == 0) continue;
    const auto& ed = inst.edge(e);
    edges.push_back({{"u", ed.u + 1}, {"v", ed.v + 1}, {"w", ed.w}, {"copies", s.copies(e)}});
  }
  return {{"edges", edges},
          {"weight", solution_weight(s, inst)},
          {"feasible", verify_sndp_feasible(s, inst)}};
}

inline json disclaimers(const CostModel& model) {
  json d = json::array();
  d.push_back(
      "MST phases use a Borůvka broadcast MST in place of a constant-round algorithm; "
      "mst rounds are measured for that substitute.");
  switch (model.kind) {
    case CostModelKind::kHonest:
      d.push_back("APSP rounds are measured engine rounds of repeated squaring, not a cited bound.");
      break;
    case CostModelKind::kClassicalCited:
      d.push_back(
          "apsp_charged_rounds evaluates ceil(n^(1/3)) * ceil(log2 n)^kappa; it is a cost model, "
          "not an executed schedule.");
      break;
    case CostModelKind::kQuantumCited:
      d.push_back(
          "apsp_charged_rounds evaluates ceil(n^(1/4)) * ceil(log2 n)^kappa for the quantum "
          "model; no quantum computation is simulated.");
      break;
  }
  return d;
}

inline json trace(const std::vector<IterationTrace>& t) {
  json out = json::array();
  for (const auto& it : t) {
    json src = json::array(), edges = json::array();
    for (auto v : it.sources) src.push_back(v + 1);
    for (const auto& k : it.tree_edges) edges.push_back(edge_pair(k));
    out.push_back({{"level", it.level},
                   {"increment", it.increment},
                   {"sources", src},
                   {"tree_edges", edges},
                   {"copies_added", it.copies_added},
                   {"mst_phases", it.mst_phases},
                   {"stats",
                    {{"spf", stats(it.spf)},
                     {"classify", stats(it.classify)},
                     {"mst", stats(it.mst)},
                     {"prune", stats(it.prune)},
                     {"total", stats(it.total)}}}});
  }
  return out;
}

inline json solve_report(const Instance& inst, const SolveResult& res, const SolverConfig& cfg,
                         bool with_trace) {
  json r;
  r["report_version"] = kReportVersion;
  r["command"] = "solve";
  r["instance"] = instance_summary(inst);
  r["config"] = {{"improve", cfg.improve},
                 {"cost_model", to_string(cfg.cost_model.kind)},
                 {"kappa", cfg.cost_model.kappa},
                 {"bandwidth_b", cfg.b}};
  r["solution"] = multigraph(res.solution, inst);
  r["heuristic"] = multigraph(res.heuristic, inst);
  r["improvement_moves"] = res.improvement_moves;
  r["mst_substituted"] = res.mst_substituted;
  r["stats"] = {{"total", stats(res.total)},
                {"apsp", stats(res.apsp)},
                {"levels", stats(res.levels)},
                {"improve", stats(res.improve)}};
  r["rounds"] = {{"measured", res.total.rounds},
                 {"heuristic", res.heuristic_rounds},
                 {"budget", res.round_budget},
                 {"apsp_charged", res.apsp_charged_rounds},
                 {"charged_total", res.charged_rounds}};
  r["disclaimers"] = disclaimers(cfg.cost_model);
  if (with_trace) r["trace"] = trace(res.trace);
  return r;
}

inline json audit_block(const AuditResult& a, const ExactResult& exact) {
  return {{"feasible", a.feasible},
          {"weight", a.weight},
          {"optimum", a.optimum},
          {"ratio", a.ratio ? json(a.ratio->str()) : json(nullptr)},
          {"bound", a.bound.value.str()},
          {"bound_row", a.bound.row},
          {"within_bound", a.within_bound},
          {"multiplicity_cap", exact.cap},
          {"search_space", exact.search_space},
          {"nodes_explored", exact.nodes_explored}};
}

inline json apsp_report(const Instance& inst, const ApspResult& res) {
  const auto n = inst.node_count();
  json dist = json::array(), routes = json::array();
  for (std::size_t v = 0; v < n; ++v) {
    json drow = json::array(), rrow = json::array();
    for (std::size_t u = 0; u < n; ++u) {
      const auto d = res.dist(v, u);
      drow.push_back(d.is_inf() ? json(nullptr) : json(d.value()));
      const auto hop = res.routes(v, u);
      rrow.push_back(hop == kNoNode ? json(nullptr) : json(hop + 1));
    }
    dist.push_back(drow);
    routes.push_back(rrow);
  }
  json r;
  r["report_version"] = kReportVersion;
  r["command"] = "apsp";
  r["instance"] = instance_summary(inst);
  r["squarings"] = res.squarings;
  r["distances"] = dist;
  r["routing"] = routes;
  r["stats"] = stats(res.stats);
  return r;
}

}  // namespace sndp::report
