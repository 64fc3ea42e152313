#include "tresca/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace tresca {

using nlohmann::json;

json json_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

json json_vector(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(json_number(v));
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

json constants_json(const EstimateConstants& c) {
  return {{"mu0", json_number(c.mu0)},
          {"mu1", json_number(c.mu1)},
          {"k0", json_number(c.k0)},
          {"p", json_number(c.p)},
          {"q", json_number(c.q)},
          {"korn", json_number(c.korn)},
          {"poincare_p", json_number(c.poincare_p)},
          {"poincare_2", json_number(c.poincare_2)},
          {"trace", json_number(c.trace)},
          {"embedding_q", json_number(c.embedding_q)},
          {"omega_measure", json_number(c.omega_measure)},
          {"gamma0_measure", json_number(c.gamma0_measure)},
          {"certified", c.certified}};
}

json report_json(const CoupledProblem& problem, const CoupledResult& result) {
  const ProblemConfig& config = problem.config();
  const Discretization& disc = problem.disc();
  const CoupledReport& rep = result.report;
  const CoupledState& st = result.state;
  const SolverSettings& s = config.solver;

  json stages = json::array();
  for (const auto& g : rep.stages) {
    stages.push_back({{"m", g.m},
                      {"delta", json_number(g.delta)},
                      {"iterations", g.iterations},
                      {"metrics", json_vector(g.metrics)},
                      {"first_metric", json_number(g.first_metric)},
                      {"final_metric", json_number(g.final_metric)},
                      {"reduction", json_number(g.reduction)},
                      {"tolerance", json_number(g.tolerance)},
                      {"theta_norm_1q", json_number(g.theta_norm_1q)},
                      {"theta_norm_12", json_number(g.theta_norm_12)},
                      {"velocity_norm_1p", json_number(g.velocity_norm)},
                      {"regularization_checks", g.regularization_checks},
                      {"max_g_inf", json_number(g.max_g_inf)},
                      {"r_delta", json_number(g.r_delta)},
                      {"r_delta_ok", g.r_delta_ok},
                      {"complementarity_ok", g.complementarity_ok},
                      {"stick_points", g.stick_points},
                      {"slip_points", g.slip_points},
                      {"newton_iterations", g.newton_iterations},
                      {"uzawa_iterations", g.uzawa_iterations}});
  }

  json doc;
  doc["config_hash"] = config_hash(config);
  doc["seed"] = config.seed;
  doc["init_hash"] = rep.init_hash;
  doc["mesh"] = {{"dimension", disc.dim()},
                 {"resolution", config.resolution},
                 {"vertices", disc.num_vertices()},
                 {"cells", disc.mesh().num_cells()},
                 {"velocity_free", disc.num_velocity_free()},
                 {"temperature_free", disc.num_temperature_free()},
                 {"gamma0_points", disc.friction_points().size()},
                 {"h_min", json_number(disc.mesh().min_cell_diameter())},
                 {"h_max", json_number(disc.mesh().max_cell_diameter())}};
  doc["exponents"] = {{"p", json_number(config.p)}, {"q", json_number(config.q)}};
  doc["tolerances"] = {{"tol_flow", json_number(s.tol_flow)},
                       {"tol_uzawa", json_number(s.tol_uzawa)},
                       {"tol_div", json_number(s.tol_div)},
                       {"tol_fp", json_number(s.tol_fp)},
                       {"tol_heat", json_number(s.tol_heat)},
                       {"eps_reg", json_number(s.eps_reg)},
                       {"rho_factor", json_number(s.rho_factor)},
                       {"relaxation", json_number(s.relaxation)}};
  doc["constants"] = constants_json(rep.constants);
  doc["flow_data_norms"] = {{"f", json_number(rep.flow_norms.f_norm)},
                            {"G_1p", json_number(rep.flow_norms.G_norm)},
                            {"DG_p", json_number(rep.flow_norms.DG_norm)},
                            {"psi_zero", json_number(rep.flow_norms.psi_zero)}};
  doc["bounds"] = {{"c_flow", json_number(rep.flow_bound)},
                   {"c_flow_ok", rep.flow_bound_ok},
                   {"heat_energy_term", json_number(rep.heat_energy)},
                   {"c_heat", json_number(rep.heat_bound)},
                   {"c_heat_ok", rep.heat_bound_ok}};
  doc["stages"] = stages;
  doc["stage_theta_ratio"] = json_number(rep.stage_theta_ratio);
  doc["warm_start_guard"] = rep.warm_start_guard;
  doc["mesh_peclet"] = json_number(rep.mesh_peclet);
  doc["peclet_ok"] = rep.peclet_ok;
  doc["final"] = {{"delta", json_number(st.delta)},
                  {"velocity_norm_1p", json_number(st.flow.diag.velocity_norm)},
                  {"theta_norm_1q", json_number(st.heat.norm_1q)},
                  {"theta_norm_12", json_number(st.heat.norm_12)},
                  {"pressure_norm", json_number(st.flow.pressure.norm())},
                  {"flow_residual", json_number(st.flow.diag.residual)},
                  {"flow_residual_scale", json_number(st.flow.diag.residual_scale)},
                  {"multiplier_change", json_number(st.flow.diag.multiplier_change)},
                  {"divergence_residual", json_number(rep.divergence_residual)},
                  {"flow_self_consistency", json_number(rep.flow_self_consistency)},
                  {"heat_self_consistency", json_number(rep.heat_self_consistency)},
                  {"pressure_recovery_gap", json_number(rep.pressure_recovery_gap)}};
  return doc;
}

void write_fields_vtk(const CoupledProblem& problem, const CoupledState& state, std::ostream& out) {
  const Discretization& disc = problem.disc();
  const int d = disc.dim();
  const int nv = disc.num_vertices();
  write_mesh_vtk(disc.mesh(), out);
  const Eigen::VectorXd u = problem.flow().total_velocity(state.flow.velocity);
  out << "POINT_DATA " << nv << "\nVECTORS velocity double\n";
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < 3; ++j)
      out << (j ? " " : "") << format_double(j < d ? u(i * d + j) : 0.0);
    out << '\n';
  }
  auto scalars = [&](const char* name, const Eigen::VectorXd& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nv; ++i) out << format_double(v(i)) << '\n';
  };
  scalars("pressure", state.flow.pressure);
  scalars("temperature", state.heat.theta);
}

void write_traction_csv(const CoupledProblem& problem, const CoupledState& state, std::ostream& out) {
  const FlowProblem& flow = problem.flow();
  const Discretization& disc = problem.disc();
  const int d = disc.dim();
  const ComplementarityReport comp = check_complementarity(flow, state.flow);
  for (int j = 0; j < d - 1; ++j) out << "x" << j + 1 << ',';
  out << "sigma_n";
  for (int j = 0; j < d - 1; ++j) out << ",sigma_tau_" << j + 1;
  out << ",sigma_tau_norm,k,state\n";
  const auto& points = disc.friction_points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& fp = points[i];
    const SymTensor sigma = gamma0_stress(flow, state.flow, state.heat.theta, i);
    const Traction t = compute_traction(sigma, disc.mesh().facets()[fp.facet].normal);
    const Vec& lam = state.flow.lambda[i];
    for (int j = 0; j < d - 1; ++j) out << format_double(fp.x(j)) << ',';
    out << format_double(t.sigma_n);
    for (int j = 0; j < d - 1; ++j) out << ',' << format_double(lam(j));
    out << ',' << format_double(lam.head(d - 1).norm()) << ',' << format_double(flow.k()[i]) << ','
        << (comp.is_stick[i] ? "stick" : "slip") << '\n';
  }
}

void write_solution(const CoupledProblem& problem, const CoupledResult& result,
                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(out_dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
    return f;
  };
  {
    auto f = open("fields.vtk");
    write_fields_vtk(problem, result.state, f);
  }
  {
    auto f = open("gamma0_traction.csv");
    write_traction_csv(problem, result.state, f);
  }
  {
    auto f = open("report.json");
    f << report_json(problem, result).dump(2) << '\n';
  }
}

}  // namespace tresca
