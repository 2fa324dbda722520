#include "pendamp/tools/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pendamp/extremal.hpp"
#include "pendamp/limits.hpp"
#include "pendamp/linosc.hpp"
#include "pendamp/quasiopt.hpp"
#include "pendamp/tools/acceptance.hpp"
#include "pendamp/tools/survey.hpp"

namespace pendamp::tools {

namespace {

using nlohmann::ordered_json;

// Raised when a computation finishes but does not deliver a usable result.
struct ComputationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string out;
  std::string format = "json";
  std::optional<double> tol;
  unsigned threads = 0;
};

// Rows of a plot-ready table; the JSON report is kept alongside.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  ordered_json json;
  Table table;
  bool ok = true;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_table(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

// key,value lines for reports without a natural table.
Table flatten(const ordered_json& j) {
  Table t;
  t.header = {"key", "value"};
  const auto flat = j.flatten();
  for (auto it = flat.begin(); it != flat.end(); ++it) {
    t.rows.push_back({it.key(), it->is_string() ? it->get<std::string>() : it->dump()});
  }
  return t;
}

std::ofstream open_file(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ComputationFailure("cannot open " + path + " for writing");
  return f;
}

ordered_json state_json(const PhaseState& s) { return {{"x", s.x}, {"y", s.y}}; }

ordered_json quad_json(const QuadratureResult& q) {
  return {{"value", q.value}, {"error_estimate", q.error_estimate}, {"converged", q.converged}};
}

ordered_json sturm_json(const SturmReport& r) {
  return {{"gaps", r.gaps},
          {"min_gap", r.gaps.empty() ? ordered_json(nullptr) : ordered_json(r.min_gap)},
          {"gaps_pass", r.gaps_pass},
          {"turns_between", r.turns_between},
          {"interleaving_pass", r.interleaving_pass},
          {"sign_products", r.sign_products},
          {"opposition_pass", r.opposition_pass}};
}

Report cmd_constants(const Globals& g) {
  const double tol = g.tol.value_or(1e-12);
  const auto D = constant_D(std::max(tol, 1e-12));
  const auto t2 = tau_minus(2.0, std::max(tol, 1e-12));
  Report r;
  r.json["config"] = {{"tol", tol}};
  r.json["D"] = D.value;
  r.json["D_error_estimate"] = D.error_estimate;
  r.json["tau_minus_2"] = t2.value;
  r.json["Phi0"] = phi0_constant();
  r.ok = D.converged && t2.converged;
  return r;
}

Report cmd_tau(const Globals& g, double E) {
  const double tol = g.tol.value_or(kDefaultLimitTol);
  Report r;
  r.json["config"] = {{"E", E}, {"tol", tol}};
  if (E < 2.0) {
    const auto t = tau_minus(E, tol);
    r.json["branch"] = "low";
    r.json["tau"] = t.value;
    r.json["tau_minus"] = quad_json(t);
    r.ok = t.converged;
  } else if (E > 2.0) {
    const auto tp = tau_plus(E, tol);
    const auto tm = tau_minus(2.0, tol);
    r.json["branch"] = "high";
    r.json["tau"] = tp.value + tm.value;
    r.json["tau_plus"] = quad_json(tp);
    r.json["tau_minus_2"] = quad_json(tm);
    r.ok = tp.converged && tm.converged;
  } else {
    // Both branches meet at the separatrix.
    const auto low = tau_minus(2.0, tol);
    const auto high = tau_plus(2.0, tol);
    const double from_above = high.value + low.value;
    const bool agree = std::abs(from_above - low.value) <= std::max(tol, 1e-12) * std::max(1.0, low.value);
    r.json["branch"] = "separatrix";
    r.json["tau"] = low.value;
    r.json["tau_low_branch"] = low.value;
    r.json["tau_high_branch"] = from_above;
    r.json["branches_agree"] = agree;
    r.ok = low.converged && high.converged && agree;
  }
  return r;
}

struct SimulateArgs {
  double x0 = 0.0;
  double y0 = 0.0;
  double epsilon = 0.1;
  double capture_k = 4.0;
  double zone_factor = 2.0;
  double budget = 0.0;
  std::string trajectory_csv;
  std::string events_csv;
};

ordered_json simulate_config(const SimulateArgs& a) {
  return {{"x0", a.x0},         {"y0", a.y0},         {"epsilon", a.epsilon},
          {"capture_k", a.capture_k}, {"zone_factor", a.zone_factor}, {"budget", a.budget}};
}

int control_at(const DampingResult& res, double t) {
  for (const auto& ph : res.phase_log) {
    if (t >= ph.t_start && t < ph.t_end) return ph.control;
  }
  return res.phase_log.empty() ? 0 : res.phase_log.back().control;
}

Report cmd_simulate(const Globals&, const SimulateArgs& a) {
  CapturePolicy cp;
  cp.capture_k = a.capture_k;
  cp.zone_factor = a.zone_factor;
  cp.time_budget = a.budget;
  cp.record_samples = !a.trajectory_csv.empty();
  const PhaseState p0{a.x0, a.y0};
  const auto res = simulate_damping(p0, Params(a.epsilon), cp);

  Report r;
  r.json["config"] = simulate_config(a);
  r.json["status"] = to_string(res.status);
  r.json["damping_time"] = res.damping_time;
  r.json["switch_count"] = res.switch_count;
  r.json["eps_T"] = a.epsilon * res.damping_time;
  r.json["eps_N"] = a.epsilon * res.switch_count;
  r.json["lower_bound"] = std::sqrt(2.0 * energy(p0)) / a.epsilon;
  r.json["maneuvers"] = res.maneuvers;
  r.json["terminal_state"] = state_json(res.terminal_state);
  if (!res.diagnostic.empty()) r.json["diagnostic"] = res.diagnostic;
  auto& log = r.json["phase_log"] = ordered_json::array();
  r.table.header = {"mode", "t_start", "t_end", "x_start", "y_start", "x_end", "y_end", "u"};
  for (const auto& ph : res.phase_log) {
    log.push_back({{"mode", to_string(ph.mode)},
                   {"t_start", ph.t_start},
                   {"t_end", ph.t_end},
                   {"start", state_json(ph.start)},
                   {"end", state_json(ph.end)},
                   {"u", ph.control}});
    r.table.rows.push_back({to_string(ph.mode), num(ph.t_start), num(ph.t_end), num(ph.start.x),
                            num(ph.start.y), num(ph.end.x), num(ph.end.y), std::to_string(ph.control)});
  }

  if (!a.trajectory_csv.empty()) {
    auto f = open_file(a.trajectory_csv);
    f << "t,x,y,phi,psi,u,E\n";
    for (const auto& s : res.trajectory.samples) {
      f << num(s.t) << ',' << num(s.state[0]) << ',' << num(s.state[1]) << ",,,"
        << control_at(res, s.t) << ',' << num(energy({s.state[0], s.state[1]})) << '\n';
    }
  }
  if (!a.events_csv.empty()) {
    auto f = open_file(a.events_csv);
    f << "t,label,x,y\n";
    for (const auto& ev : res.trajectory.events) {
      f << num(ev.t) << ',' << ev.label << ',' << num(ev.state[0]) << ',' << num(ev.state[1]) << '\n';
    }
  }
  r.ok = res.status == DampingStatus::Captured;
  return r;
}

struct SweepArgs {
  double x0 = -3.0;
  double y0 = 0.0;
  std::vector<double> eps{0.2, 0.1, 0.05, 0.02};
  double capture_k = 4.0;
};

Report cmd_sweep(const Globals& g, const SweepArgs& a) {
  CapturePolicy cp;
  cp.capture_k = a.capture_k;
  cp.record_samples = false;
  const auto tab = sweep_scaling({a.x0, a.y0}, a.eps, cp, resolve_threads(g.threads));
  Report r;
  r.json["config"] = {{"x0", a.x0}, {"y0", a.y0}, {"eps", a.eps}, {"capture_k", a.capture_k}};
  auto& rows = r.json["rows"] = ordered_json::array();
  r.table.header = {"epsilon", "T", "N", "epsT", "epsN"};
  for (const auto& row : tab.rows) {
    rows.push_back({{"epsilon", row.epsilon},
                    {"T", row.T},
                    {"N", row.N},
                    {"epsT", row.eps_T},
                    {"epsN", row.eps_N},
                    {"status", to_string(row.status)}});
    r.table.rows.push_back({num(row.epsilon), num(row.T), std::to_string(row.N), num(row.eps_T),
                            num(row.eps_N)});
    if (row.status != DampingStatus::Captured) r.ok = false;
  }
  r.json["eps_T_fit"] = {{"a", tab.eps_T_fit.a}, {"b", tab.eps_T_fit.b}};
  r.json["eps_N_fit"] = {{"a", tab.eps_N_fit.a}, {"b", tab.eps_N_fit.b}};
  const double E = energy({a.x0, a.y0});
  if (E > 0.0 && E != 2.0) r.json["tau_of_E"] = tau(E).value;
  return r;
}

struct ExtremalArgs {
  double epsilon = 0.2;
  std::size_t points = 512;
  double phi_max = 0.0;
  double standstill_factor = 2.0;
  std::optional<double> trace_phi_t;
  int sign = 1;
  std::string trajectory_csv;
};

Report cmd_extremals(const Globals& g, const ExtremalArgs& a) {
  const Params p(a.epsilon);
  Report r;
  r.json["config"] = {{"epsilon", a.epsilon},
                      {"points", a.points},
                      {"phi_max", a.phi_max},
                      {"standstill_factor", a.standstill_factor}};
  StopPolicy stop;
  stop.standstill_factor = a.standstill_factor;

  if (a.trace_phi_t) {
    r.json["config"]["trace_phi_t"] = *a.trace_phi_t;
    r.json["config"]["sign"] = a.sign;
    stop.record_samples = true;
    const auto run = trace_extremal(*a.trace_phi_t, a.sign, p, stop);
    r.json["stop_reason"] = to_string(run.stop_reason);
    r.json["duration"] = run.duration();
    r.json["switch_count"] = run.switch_count;
    r.json["raw_switch_count"] = run.raw_switch_count;
    r.json["high_energy_allowance"] = run.high_energy_allowance;
    r.json["cutoff_time"] = run.cutoff_time;
    auto& sw = r.json["switches"] = ordered_json::array();
    r.table.header = {"t", "x", "y", "zone", "counted"};
    for (const auto& s : run.switches) {
      sw.push_back({{"t", s.t}, {"x", s.state.x}, {"y", s.state.y}, {"zone", to_string(s.zone)},
                    {"counted", s.counted}});
      r.table.rows.push_back({num(s.t), num(s.state.x), num(s.state.y), to_string(s.zone),
                              s.counted ? "1" : "0"});
    }
    r.json["sturm"] = sturm_json(verify_sturm_properties(run));
    if (!run.diagnostic.empty()) r.json["diagnostic"] = run.diagnostic;
    if (!a.trajectory_csv.empty()) {
      auto f = open_file(a.trajectory_csv);
      f << "t,x,y,phi,psi,u,E\n";
      for (const auto& s : run.trajectory.samples) {
        const auto& q = s.state;
        f << num(s.t) << ',' << num(q[0]) << ',' << num(q[1]) << ',' << num(q[2]) << ','
          << num(q[3]) << ',' << (q[3] > 0.0 ? 1 : q[3] < 0.0 ? -1 : 0) << ','
          << num(energy({q[0], q[1]})) << '\n';
      }
    }
    r.ok = run.stop_reason != ExtremalStop::StepFailure;
    return r;
  }

  SweepPolicy sp;
  sp.points_per_sign = a.points;
  sp.phi_max = a.phi_max;
  sp.stop = stop;
  sp.threads = resolve_threads(g.threads);
  const auto s = survey_extremals(p, sp);
  r.json["epsilon"] = a.epsilon;
  r.json["max_switchings"] = s.sweep.max_switchings;
  r.json["argmax_phiT"] = s.sweep.argmax_phi_T;
  r.json["argmax_sign"] = s.sweep.argmax_sign;
  r.json["max_per_sign"] = {{"minus", s.sweep.max_per_sign[0]}, {"plus", s.sweep.max_per_sign[1]}};
  r.json["bound_with_allowance"] = s.sweep.bound_with_allowance;
  r.json["boundary_flag"] = s.sweep.boundary_flag;
  r.json["unresolved"] = s.sweep.unresolved;
  r.json["sturm"] = {{"runs", s.runs},
                     {"checked_pairs", s.checked_pairs},
                     {"min_gap", s.min_gap},
                     {"gap_violations", s.gap_violations},
                     {"interleaving_violations", s.interleaving_violations},
                     {"opposition_violations", s.opposition_violations},
                     {"lemma_violations", s.lemma_violations}};
  auto& runs = r.json["runs"] = ordered_json::array();
  r.table.header = {"phi_T", "sign", "switch_count", "raw_switch_count", "allowance", "stop_reason",
                    "duration"};
  for (const auto& run : s.sweep.runs) {
    runs.push_back({{"phi_T", run.phi_T},
                    {"sign", run.sign},
                    {"switch_count", run.switch_count},
                    {"raw_switch_count", run.raw_switch_count},
                    {"allowance", run.high_energy_allowance},
                    {"stop_reason", to_string(run.stop_reason)},
                    {"duration", run.duration}});
    r.table.rows.push_back({num(run.phi_T), std::to_string(run.sign), std::to_string(run.switch_count),
                            std::to_string(run.raw_switch_count),
                            std::to_string(run.high_energy_allowance), to_string(run.stop_reason),
                            num(run.duration)});
  }
  return r;
}

Report cmd_bifurcations(const Globals& g, int n_max, std::size_t points) {
  const double tol = g.tol.value_or(1e-6);
  SweepPolicy sp;
  sp.points_per_sign = points;
  sp.threads = resolve_threads(g.threads);
  const auto table = bifurcation_table(n_max, tol, sp);
  Report r;
  r.json["config"] = {{"n_max", n_max}, {"tol", tol}, {"points", points}};
  const double D = constant_D().value;
  r.json["D"] = D;
  auto& rows = r.json["rows"] = ordered_json::array();
  r.table.header = {"n", "epsilon_n", "n_times_epsilon_n", "bracket_width"};
  for (const auto& row : table) {
    ordered_json j = {{"n", row.n},
                      {"epsilon_n", row.epsilon_n},
                      {"n_times_epsilon_n", row.product},
                      {"relative_to_D", (row.product - D) / D},
                      {"bracket_width", row.bracket_width},
                      {"status", to_string(row.status)}};
    if (!row.diagnostic.empty()) j["diagnostic"] = row.diagnostic;
    rows.push_back(std::move(j));
    r.table.rows.push_back({std::to_string(row.n), num(row.epsilon_n), num(row.product),
                            num(row.bracket_width)});
    if (row.status != BifurcationStatus::Ok) r.ok = false;
  }
  return r;
}

Report cmd_euler(const Globals&, double x0, const std::vector<double>& eps) {
  const auto rows = euler_convergence(x0, eps);
  Report r;
  r.json["config"] = {{"x0", x0}, {"eps", eps}};
  auto& out = r.json["rows"] = ordered_json::array();
  r.table.header = {"epsilon", "steps", "sup_error", "ratio"};
  for (const auto& row : rows) {
    out.push_back({{"epsilon", row.epsilon},
                   {"steps", row.steps},
                   {"sup_error", row.sup_error},
                   {"ratio", std::isnan(row.ratio) ? ordered_json(nullptr) : ordered_json(row.ratio)}});
    r.table.rows.push_back({num(row.epsilon), std::to_string(row.steps), num(row.sup_error),
                            num(row.ratio)});
  }
  return r;
}

struct LinearArgs {
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> support;
  double sample_step = 0.0;
  std::string trajectory_csv;
  std::string curve_csv;
  double curve_reach = 10.0;
};

Report cmd_linear(const Globals&, const LinearArgs& a) {
  Report r;
  if (!a.support.empty()) {
    const double H = lin_support(a.support[0], a.support[1], a.support[2]);
    r.json["config"] = {{"support", a.support}};
    r.json["H"] = H;
    r.json["linear_part"] = 2.0 / kPi * std::hypot(a.support[0], a.support[1]) * a.support[2];
    return r;
  }
  r.json["config"] = {{"x0", a.x0}, {"y0", a.y0}, {"sample_step", a.sample_step}};
  const auto run = lin_simulate({a.x0, a.y0}, a.sample_step);
  r.json["T"] = run.T;
  r.json["switches"] = run.switches;
  auto& pts = r.json["switch_points"] = ordered_json::array();
  r.table.header = {"t", "x", "y"};
  for (const auto& s : run.switch_points) {
    pts.push_back({{"t", s.t}, {"x", s.state.x}, {"y", s.state.y}});
    r.table.rows.push_back({num(s.t), num(s.state.x), num(s.state.y)});
  }
  if (!run.diagnostic.empty()) r.json["diagnostic"] = run.diagnostic;
  if (!a.trajectory_csv.empty()) {
    auto f = open_file(a.trajectory_csv);
    f << "t,x,y\n";
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      f << num(run.t[i]) << ',' << num(run.states[i].x) << ',' << num(run.states[i].y) << '\n';
    }
  }
  if (!a.curve_csv.empty()) {
    const SwitchingCurve curve(a.curve_reach);
    auto f = open_file(a.curve_csv);
    f << "x,y\n";
    const int n = static_cast<int>(std::ceil(a.curve_reach * 100.0));
    for (int i = -n; i <= n; ++i) {
      const double x = a.curve_reach * i / n;
      f << num(x) << ',' << num(curve.height(x)) << '\n';
    }
  }
  r.ok = run.ok;
  return r;
}

void emit_report(const Globals& g, const std::string& command, Report& r, std::ostream& out) {
  ordered_json doc;
  doc["command"] = command;
  ordered_json cfg = r.json.contains("config") ? r.json["config"] : ordered_json::object();
  cfg["format"] = g.format;
  if (g.tol) cfg["tol"] = *g.tol;
  cfg["threads"] = g.threads;
  doc["config"] = cfg;
  for (auto it = r.json.begin(); it != r.json.end(); ++it) {
    if (it.key() != "config") doc[it.key()] = it.value();
  }
  doc["ok"] = r.ok;

  std::ofstream file;
  std::ostream* os = &out;
  if (!g.out.empty()) {
    file = open_file(g.out);
    os = &file;
  }
  if (g.format == "csv") {
    write_table(*os, r.table.header.empty() ? flatten(doc) : r.table);
  } else {
    *os << doc.dump(2) << '\n';
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-optimal damping of a pendulum: limits, extremals and quasioptimal control"};
  app.name("pendamp");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file overriding defaults ([sub] sections for subcommands)");

  Globals g;
  double tol_value = 0.0;
  app.add_option("--out", g.out, "Write the report to this file");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  auto* tol_opt = app.add_option("--tol", tol_value, "Quadrature / bisection tolerance")
                      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads, 0 = hardware concurrency");

  auto* constants = app.add_subcommand("constants", "D, tau-(2) and Phi0");

  double E = 0.0;
  auto* tau_cmd = app.add_subcommand("tau", "Limit damping time tau(E)");
  tau_cmd->add_option("--E", E, "Energy")->required()->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Dry-friction damping run");
  simulate->add_option("--x0", sim.x0, "Initial angle")->required();
  simulate->add_option("--y0", sim.y0, "Initial speed")->required();
  simulate->add_option("--epsilon", sim.epsilon, "Control amplitude")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--capture-k", sim.capture_k, "Capture energy in units of eps^2")->check(CLI::PositiveNumber);
  simulate->add_option("--zone-factor", sim.zone_factor, "Standstill zone half width in eps")->check(CLI::PositiveNumber);
  simulate->add_option("--budget", sim.budget, "Time budget, 0 = 64/eps")->check(CLI::NonNegativeNumber);
  simulate->add_option("--trajectory-csv", sim.trajectory_csv, "Write t,x,y,phi,psi,u,E samples");
  simulate->add_option("--events-csv", sim.events_csv, "Write t,label,x,y events");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Scaling table of eps*T and eps*N");
  sweep_cmd->add_option("--x0", sweep.x0, "Initial angle");
  sweep_cmd->add_option("--y0", sweep.y0, "Initial speed");
  sweep_cmd->add_option("--eps", sweep.eps, "Decreasing list of eps")->delimiter(',')->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--capture-k", sweep.capture_k, "Capture energy in units of eps^2")->check(CLI::PositiveNumber);

  ExtremalArgs ext;
  double trace_phi = 0.0;
  auto* extremals = app.add_subcommand("extremals", "Maximal switching number and Sturm checks");
  extremals->add_option("--epsilon", ext.epsilon, "Control amplitude")->required()->check(CLI::PositiveNumber);
  extremals->add_option("--points", ext.points, "Grid points per costate sign")->check(CLI::Range(2, 1 << 20));
  extremals->add_option("--phi-max", ext.phi_max, "Half width of the phi_T grid, 0 = 4/eps")->check(CLI::NonNegativeNumber);
  extremals->add_option("--standstill-factor", ext.standstill_factor, "Zone stop factor, 0 disables")->check(CLI::NonNegativeNumber);
  auto* trace_opt = extremals->add_option("--trace-phi-t", trace_phi, "Trace a single extremal instead");
  extremals->add_option("--sign", ext.sign, "Terminal sign of psi for --trace-phi-t")->check(CLI::IsMember({-1, 1}));
  extremals->add_option("--trajectory-csv", ext.trajectory_csv, "Write t,x,y,phi,psi,u,E for --trace-phi-t");

  int n_max = 8;
  std::size_t bif_points = 512;
  auto* bif = app.add_subcommand("bifurcations", "Table of eps_n and n*eps_n");
  bif->add_option("--n-max", n_max, "Largest n")->check(CLI::Range(1, 64));
  bif->add_option("--points", bif_points, "Grid points per costate sign")->check(CLI::Range(2, 1 << 20));

  double euler_x0 = 3.0;
  std::vector<double> euler_eps{0.02, 0.01, 0.005, 0.0025};
  auto* euler = app.add_subcommand("euler", "Broken lines against the limit path");
  euler->add_option("--x0", euler_x0, "Initial amplitude")->check(CLI::Range(0.0, kPi));
  euler->add_option("--eps", euler_eps, "List of eps")->delimiter(',')->check(CLI::PositiveNumber);

  LinearArgs lin;
  auto* linear = app.add_subcommand("linear", "Linear oscillator baseline");
  auto* lx = linear->add_option("--x0", lin.x0, "Initial x");
  auto* ly = linear->add_option("--y0", lin.y0, "Initial y");
  auto* sup = linear->add_option("--support", lin.support, "xi1 xi2 T: support function H_T(xi)")->expected(3);
  linear->add_option("--sample-step", lin.sample_step, "Sampling step for --trajectory-csv")->check(CLI::NonNegativeNumber);
  linear->add_option("--trajectory-csv", lin.trajectory_csv, "Write t,x,y samples");
  linear->add_option("--curve-csv", lin.curve_csv, "Write the switching curve as x,y");
  linear->add_option("--curve-reach", lin.curve_reach, "Half width of --curve-csv")->check(CLI::PositiveNumber);
  sup->excludes(lx)->excludes(ly);

  bool fast = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_flag("--fast", fast, "Coarser extremal grid and bifurcation tolerance");

  try {
    app.parse(argc, argv);
    if (tol_opt->count() > 0) g.tol = tol_value;
    if (simulate->parsed() && !(sim.zone_factor * sim.epsilon < 1.0)) {
      throw CLI::ValidationError("--epsilon", "zone_factor * epsilon must be below 1");
    }
    if (sweep_cmd->parsed()) {
      if (sweep.eps.size() < 2) throw CLI::ValidationError("--eps", "need at least two values");
      for (std::size_t i = 1; i < sweep.eps.size(); ++i) {
        if (!(sweep.eps[i] < sweep.eps[i - 1])) {
          throw CLI::ValidationError("--eps", "values must be strictly decreasing");
        }
      }
      if (!(2.0 * sweep.eps.front() < 1.0)) throw CLI::ValidationError("--eps", "values must be below 0.5");
    }
    if (extremals->parsed()) {
      if (trace_opt->count() > 0) ext.trace_phi_t = trace_phi;
      else if (!ext.trajectory_csv.empty()) {
        throw CLI::ValidationError("--trajectory-csv", "needs --trace-phi-t");
      }
    }
    if (euler->parsed() && euler_eps.empty()) throw CLI::ValidationError("--eps", "empty list");
    if (linear->parsed() && sup->count() == 0 && (lx->count() == 0 || ly->count() == 0)) {
      throw CLI::ValidationError("--x0/--y0", "both are required unless --support is given");
    }
    if (linear->parsed() && sup->count() > 0 && !(lin.support[2] >= 0.0)) {
      throw CLI::ValidationError("--support", "T must be nonnegative");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) {
      AcceptanceOptions opt;
      opt.fast = fast;
      opt.threads = g.threads;
      std::ofstream file;
      if (!g.out.empty()) file = open_file(g.out);
      int failed = 0;
      run_acceptance(opt, [&](const CriterionResult& r) {
        const auto line = format_result(r);
        out << line << std::endl;
        if (file.is_open()) file << line << '\n';
        if (!r.pass) ++failed;
      });
      const std::string summary =
          failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed";
      out << summary << '\n';
      if (file.is_open()) file << summary << '\n';
      return failed == 0 ? kExitOk : kExitFailure;
    }

    Report r;
    std::string name;
    if (constants->parsed()) {
      name = "constants";
      r = cmd_constants(g);
    } else if (tau_cmd->parsed()) {
      name = "tau";
      r = cmd_tau(g, E);
    } else if (simulate->parsed()) {
      name = "simulate";
      r = cmd_simulate(g, sim);
    } else if (sweep_cmd->parsed()) {
      name = "sweep";
      r = cmd_sweep(g, sweep);
    } else if (extremals->parsed()) {
      name = "extremals";
      r = cmd_extremals(g, ext);
    } else if (bif->parsed()) {
      name = "bifurcations";
      r = cmd_bifurcations(g, n_max, bif_points);
    } else if (euler->parsed()) {
      name = "euler";
      r = cmd_euler(g, euler_x0, euler_eps);
    } else {
      name = "linear";
      r = cmd_linear(g, lin);
    }
    emit_report(g, name, r, out);
    if (!r.ok) {
      err << "pendamp " << name << ": computation did not converge or finish; see the report\n";
      return kExitFailure;
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "pendamp: invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pendamp: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace pendamp::tools
