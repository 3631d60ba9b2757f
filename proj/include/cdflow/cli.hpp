#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdflow/cd_certifier.hpp"
#include "cdflow/constants.hpp"
#include "cdflow/discretization.hpp"
#include "cdflow/entropy_flow.hpp"
#include "cdflow/inequality_lab.hpp"
#include "cdflow/random_fields.hpp"
#include "cdflow/report.hpp"

namespace cdflow::cli {

struct Options {
  // operator
  std::string family = "quadratic";
  std::vector<double> poly;
  double beta = 3.0;
  // grid
  std::size_t nodes = 8001;
  std::optional<double> R;
  double tail_tol = 1e-12;
  std::string grid = "auto";
  // outputs
  std::string json_path, csv_path;
  std::uint64_t seed = 0;
  // certify / frontier
  double rho = 0.0, n = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();
  double n_min = -1e6, n_max = 1e6;
  bool grid_scan = false;
  // constants
  std::string name;
  std::optional<double> c_n, c_beta, c_p, c_rho, c_d;
  std::string sweep;
  // flow
  std::string entropy = "variance";
  double p = 2.0;
  std::string init = "x";
  double t_end = 2.0, dt = 1e-4, K = 4.0, theta = 0.0, scheme = 0.5;
  int record_every = 100;
  // gap / beckner
  std::size_t trials = 1000;
  std::optional<double> C;
  std::string source = "weighted";
  bool unweighted = false;
  std::optional<double> refined_theta;
};

inline WeightFunction make_weight(const Options& o) {
  if (!o.poly.empty()) return WeightFunction::even_polynomial(o.poly);
  if (o.family == "quadratic") return WeightFunction::quadratic();
  if (o.family == "quartic") return WeightFunction::quartic();
  fail(ErrorKind::InvalidArgument, "--family must be quadratic or quartic (or pass --poly c0,c2,...)");
}

inline MeasureOptions measure_options(const Options& o) {
  MeasureOptions m;
  m.tail_tol = o.tail_tol;
  m.nodes = o.nodes;
  m.half_width = o.R;
  if (o.grid == "uniform") m.grid = GridChoice::uniform;
  else if (o.grid == "sinh") m.grid = GridChoice::sinh;
  else if (o.grid == "auto") m.grid = GridChoice::automatic;
  else fail(ErrorKind::InvalidArgument, "--grid must be auto, uniform or sinh");
  return m;
}

inline Json operator_config(const Options& o) {
  Json j;
  j["family"] = o.poly.empty() ? o.family : std::string("poly");
  j["poly"] = o.poly;
  j["beta"] = o.beta;
  j["N"] = o.nodes;
  j["R"] = number(o.R);
  j["tail_tol"] = o.tail_tol;
  j["grid"] = o.grid;
  return j;
}

inline void emit(const Json& report, const Options& o, std::ostream& out) {
  const std::string text = report.dump(2);
  out << text << '\n';
  if (!o.json_path.empty()) {
    std::ofstream f(o.json_path);
    require(static_cast<bool>(f), ErrorKind::InvalidArgument, "cannot write --json " + o.json_path);
    f << text << '\n';
  }
}

inline std::ofstream open_csv(const Options& o) {
  std::ofstream f(o.csv_path);
  require(static_cast<bool>(f), ErrorKind::InvalidArgument, "cannot write --csv " + o.csv_path);
  return f;
}

inline void merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

inline Json header(const std::string& command, const Options& o, Json config) {
  Json j;
  j["version"] = version();
  j["command"] = command;
  config["seed"] = o.seed;
  config["json"] = o.json_path;
  config["csv"] = o.csv_path;
  j["config"] = std::move(config);
  j["seed"] = o.seed;
  return j;
}

inline int cmd_certify(const Options& o, std::ostream& out) {
  require_dimension(o.n);
  const OperatorSpec op = make_operator(make_weight(o), o.beta, measure_options(o));
  Json cfg = operator_config(o);
  cfg["rho"] = o.rho;
  cfg["n"] = o.n;
  cfg["grid_scan"] = o.grid_scan;
  Json rep = header("certify", o, cfg);
  rep["grid"] = grid_json(*op.measure);
  CertifyOptions copt;
  copt.force_grid_scan = o.grid_scan;
  const CDCertificate c = certify(op, o.rho, o.n, copt);
  merge(rep, to_json(c));
  rep["slack_limit"] = number(cd_slack_limit(op, o.rho, o.n));
  emit(rep, o, out);
  return 0;
}

inline int cmd_frontier(const Options& o, std::ostream& out) {
  const OperatorSpec op = make_operator(make_weight(o), o.beta, measure_options(o));
  FrontierOptions fopt;
  fopt.rho_max = o.rho_max;
  fopt.n_min = o.n_min;
  fopt.n_max = o.n_max;
  fopt.force_grid_scan = o.grid_scan;
  Json cfg = operator_config(o);
  cfg["rho_max"] = number(o.rho_max);
  cfg["n_min"] = o.n_min;
  cfg["n_max"] = o.n_max;
  cfg["grid_scan"] = o.grid_scan;
  Json rep = header("frontier", o, cfg);
  rep["grid"] = grid_json(*op.measure);
  merge(rep, to_json(frontier(op, fopt)));
  emit(rep, o, out);
  return 0;
}

inline std::map<std::string, double> constant_inputs(const Options& o) {
  std::map<std::string, double> in;
  if (o.c_n) in["n"] = *o.c_n;
  if (o.c_beta) in["beta"] = *o.c_beta;
  if (o.c_p) in["p"] = *o.c_p;
  if (o.c_rho) in["rho"] = *o.c_rho;
  if (o.c_d) in["d"] = *o.c_d;
  return in;
}

inline int cmd_constants(const Options& o, std::ostream& out) {
  require(!o.name.empty(), ErrorKind::InvalidArgument, "--name is required");
  if (o.sweep.empty()) {
    Json cfg;
    cfg["name"] = o.name;
    Json in = Json::object();
    for (const auto& [k, v] : constant_inputs(o)) in[k] = v;
    cfg["inputs"] = in;
    Json rep = header("constants", o, cfg);
    rep["grid"] = nullptr;
    merge(rep, to_json(evaluate_constant(o.name, constant_inputs(o))));
    emit(rep, o, out);
    return 0;
  }
  // --sweep var=a:b:step
  const auto eq = o.sweep.find('=');
  require(eq != std::string::npos, ErrorKind::InvalidArgument, "--sweep expects var=start:stop:step");
  const std::string var = o.sweep.substr(0, eq);
  std::vector<double> parts;
  std::stringstream ss(o.sweep.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ':');) {
    try {
      parts.push_back(std::stod(item));
    } catch (...) {
      fail(ErrorKind::InvalidArgument, "--sweep: cannot parse '" + item + "'");
    }
  }
  require(parts.size() == 3 && parts[2] != 0.0 && (parts[1] - parts[0]) / parts[2] >= 0.0,
          ErrorKind::InvalidArgument, "--sweep expects var=start:stop:step with step toward stop");
  require(var == "n" || var == "beta" || var == "p" || var == "rho" || var == "d", ErrorKind::InvalidArgument,
          "--sweep variable must be one of n, beta, p, rho, d");
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::ostringstream csv;
  csv.precision(17);
  csv << var << ',' << o.name << '\n';
  for (long k = 0; k < count; ++k) {
    const double v = parts[0] + static_cast<double>(k) * parts[2];
    auto in = constant_inputs(o);
    in[var] = v;
    const ConstantReport r = evaluate_constant(o.name, in);
    csv << v << ',';
    if (r.value) csv << *r.value;
    csv << '\n';
  }
  if (o.csv_path.empty()) {
    out << csv.str();
  } else {
    open_csv(o) << csv.str();
  }
  return 0;
}

inline PhiEntropy make_entropy(const Options& o) {
  if (o.entropy == "variance") return PhiEntropy::variance();
  if (o.entropy == "power") return PhiEntropy::power(o.p);
  if (o.entropy == "xlogx") return PhiEntropy::xlogx();
  fail(ErrorKind::InvalidArgument, "--entropy must be variance, power or xlogx");
}

inline int cmd_flow(const Options& o, std::ostream& out) {
  const OperatorSpec op = make_operator(make_weight(o), o.beta, measure_options(o));
  auto dop = std::make_shared<const DiscretizedOperator>(discretize(op));
  FlowConfig cfg;
  cfg.dop = dop;
  cfg.entropy = make_entropy(o);
  cfg.t_end = o.t_end;
  cfg.dt = o.dt;
  cfg.record_every = o.record_every;
  cfg.scheme_weight = o.scheme;
  if (o.init == "x") cfg.initial = sample(op, [](double x) { return x; });
  else if (o.init == "const") cfg.initial = sample(op, [](double) { return 1.0; });
  else if (o.init == "random") cfg.initial = random_positive_function(op.grid_ptr(), o.seed);
  else fail(ErrorKind::InvalidArgument, "--init must be x, const or random");

  const FlowTrace tr = run_flow(cfg, o.K, o.theta);
  const bool decay_ok = decay_certificate(tr, o.K, cfg.tol);
  bool refined_ok = decay_ok;
  if (o.theta > 0.0) {
    try {
      refined_ok = refined_decay_certificate(tr, o.K, o.theta, cfg.tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      refined_ok = false;
    }
  }
  Json c = operator_config(o);
  c["entropy"] = o.entropy;
  c["p"] = o.p;
  c["init"] = o.init;
  c["t_end"] = o.t_end;
  c["dt"] = o.dt;
  c["K"] = o.K;
  c["theta"] = o.theta;
  c["record_every"] = o.record_every;
  c["scheme_weight"] = o.scheme;
  Json rep = header("flow", o, c);
  rep["grid"] = grid_json(*op.measure);
  merge(rep, flow_summary(tr, decay_ok, refined_ok));
  if (!o.csv_path.empty()) {
    auto f = open_csv(o);
    write_flow_csv(f, tr);
  }
  emit(rep, o, out);
  return 0;
}

inline int cmd_gap(const Options& o, std::ostream& out) {
  const OperatorSpec op = make_operator(make_weight(o), o.beta, measure_options(o));
  const DiscretizedOperator dop = discretize(op);
  const GapReport g = spectral_gap(dop, !o.unweighted);
  Json c = operator_config(o);
  c["unweighted"] = o.unweighted;
  Json rep = header("gap", o, c);
  rep["grid"] = grid_json(*op.measure);
  merge(rep, to_json(g));
  if (!o.csv_path.empty()) {
    auto f = open_csv(o);
    write_grid_csv(f, g.eigenvector);
  }
  emit(rep, o, out);
  return 0;
}

inline int cmd_beckner(const Options& o, std::ostream& out) {
  const OperatorSpec op = make_operator(make_weight(o), o.beta, measure_options(o));
  const DiscretizedOperator dop = discretize(op);
  FalsifierOptions fopt;
  fopt.theta = o.refined_theta;
  double C = 0.0;
  if (o.source == "weighted") {
    fopt.source = ConstantSource::weighted;
    require(o.beta > 1.0 || o.C, ErrorKind::OutOfRange, "weighted constant 1/(c(beta-1)) needs beta > 1");
    C = o.C ? *o.C : 1.0 / (op.w.convexity() * (o.beta - 1.0));
  } else if (o.source == "cd") {
    fopt.source = ConstantSource::cd;
    C = o.C ? *o.C : 1.0 / frontier(op).best_constant;
  } else {
    fail(ErrorKind::InvalidArgument, "--source must be weighted or cd");
  }
  const BecknerReport b = randomized_falsifier(dop, o.p, C, o.trials, o.seed, !o.unweighted, fopt);
  Json c = operator_config(o);
  c["p"] = o.p;
  c["C"] = C;
  c["source"] = o.source;
  c["trials"] = o.trials;
  c["unweighted"] = o.unweighted;
  c["theta"] = number(o.refined_theta);
  Json rep = header("beckner", o, c);
  rep["grid"] = grid_json(*op.measure);
  merge(rep, to_json(b));
  if (!o.csv_path.empty()) {
    auto f = open_csv(o);
    f.precision(17);
    f << "trial,quotient" << (b.theta ? ",refined_quotient" : "") << '\n';
    for (std::size_t i = 0; i < b.quotients.size(); ++i) {
      f << i << ',' << b.quotients[i];
      if (b.theta) f << ',' << b.refined_quotients[i];
      f << '\n';
    }
  }
  emit(rep, o, out);
  return 0;
}

inline void add_operator_flags(CLI::App* sub, Options& o) {
  sub->add_option("--family", o.family, "Weight family: quadratic or quartic")->capture_default_str();
  sub->add_option("--poly", o.poly, "Even coefficients c0,c2,c4,... of phi")->delimiter(',');
  sub->add_option("--beta", o.beta, "Exponent beta")->capture_default_str();
  sub->add_option("--N", o.nodes, "Grid nodes")->capture_default_str();
  sub->add_option("--R", o.R, "Truncation half-width (overrides tail bound)");
  sub->add_option("--tail-tol", o.tail_tol, "Tail mass tolerance")->capture_default_str();
  sub->add_option("--grid", o.grid, "Node layout: auto, uniform or sinh")->capture_default_str();
}

inline void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--json", o.json_path, "Also write the JSON report here");
  sub->add_option("--csv", o.csv_path, "Write the CSV series here");
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"cdflow: curvature-dimension certificates and functional inequalities for weighted 1D diffusions"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  auto* certify_cmd = app.add_subcommand("certify", "Certify CD(rho, n) for the weighted operator");
  add_operator_flags(certify_cmd, o);
  add_output_flags(certify_cmd, o);
  certify_cmd->add_option("--rho", o.rho, "Curvature rho >= 0")->required();
  certify_cmd->add_option("--n", o.n, "Dimension n outside [0,1]")->required();
  certify_cmd->add_flag("--grid-scan", o.grid_scan, "Scan the grid even when a closed form exists");

  auto* frontier_cmd = app.add_subcommand("frontier", "Maximize rho n/(n-1) over certified pairs");
  add_operator_flags(frontier_cmd, o);
  add_output_flags(frontier_cmd, o);
  frontier_cmd->add_option("--rho-max", o.rho_max, "Upper bound on rho");
  frontier_cmd->add_option("--n-min", o.n_min, "Lower end of the n search")->capture_default_str();
  frontier_cmd->add_option("--n-max", o.n_max, "Upper end of the n search")->capture_default_str();
  frontier_cmd->add_flag("--grid-scan", o.grid_scan, "Use the numerical search even for quadratic phi");

  auto* constants_cmd = app.add_subcommand("constants", "Evaluate a closed-form constant");
  add_output_flags(constants_cmd, o);
  constants_cmd
      ->add_option("--name", o.name,
                   "c_phi, p_star_weighted, p_star, q_star, alpha, theta, poincare_constant, c_beta, p_star_bgs")
      ->required();
  constants_cmd->add_option("--n", o.c_n, "Dimension n");
  constants_cmd->add_option("--beta", o.c_beta, "Exponent beta");
  constants_cmd->add_option("--p", o.c_p, "Exponent p");
  constants_cmd->add_option("--rho", o.c_rho, "Curvature rho");
  constants_cmd->add_option("--d", o.c_d, "Manifold dimension d");
  constants_cmd->add_option("--sweep", o.sweep, "var=start:stop:step, writes CSV");

  auto* flow_cmd = app.add_subcommand("flow", "Run the entropy flow and check decay inequalities");
  add_operator_flags(flow_cmd, o);
  add_output_flags(flow_cmd, o);
  flow_cmd->add_option("--entropy", o.entropy, "variance, power or xlogx")->capture_default_str();
  flow_cmd->add_option("--p", o.p, "Power for --entropy power")->capture_default_str();
  flow_cmd->add_option("--init", o.init, "Initial datum: x, const or random")->capture_default_str();
  flow_cmd->add_option("--t-end", o.t_end, "Final time")->capture_default_str();
  flow_cmd->add_option("--dt", o.dt, "Time step")->capture_default_str();
  flow_cmd->add_option("--K", o.K, "Rate under test")->capture_default_str();
  flow_cmd->add_option("--theta", o.theta, "Refined-inequality exponent")->capture_default_str();
  flow_cmd->add_option("--record-every", o.record_every, "Steps between records")->capture_default_str();
  flow_cmd->add_option("--scheme-weight", o.scheme, "Implicit weight in [0.5, 1]")->capture_default_str();

  auto* gap_cmd = app.add_subcommand("gap", "Spectral gap of the weighted Dirichlet form");
  add_operator_flags(gap_cmd, o);
  add_output_flags(gap_cmd, o);
  gap_cmd->add_flag("--unweighted", o.unweighted, "Use Gamma(f) = f'^2 instead of phi f'^2");

  auto* beckner_cmd = app.add_subcommand("beckner", "Randomized falsification of a Beckner inequality");
  add_operator_flags(beckner_cmd, o);
  add_output_flags(beckner_cmd, o);
  beckner_cmd->add_option("--p", o.p, "Beckner exponent in (1, 2]")->capture_default_str();
  beckner_cmd->add_option("--trials", o.trials, "Random test functions")->capture_default_str();
  beckner_cmd->add_option("--C", o.C, "Constant under test (default from --source)");
  beckner_cmd->add_option("--source", o.source, "weighted or cd")->capture_default_str();
  beckner_cmd->add_option("--theta", o.refined_theta, "Also test the refined inequality with this theta");
  beckner_cmd->add_flag("--unweighted", o.unweighted, "Use Gamma(f) = f'^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(o, out);
    if (frontier_cmd->parsed()) return cmd_frontier(o, out);
    if (constants_cmd->parsed()) return cmd_constants(o, out);
    if (flow_cmd->parsed()) return cmd_flow(o, out);
    if (gap_cmd->parsed()) return cmd_gap(o, out);
    if (beckner_cmd->parsed()) return cmd_beckner(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical_failure(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace cdflow::cli
