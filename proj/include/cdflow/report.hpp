#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdflow/cd_certifier.hpp"
#include "cdflow/constants.hpp"
#include "cdflow/entropy_flow.hpp"
#include "cdflow/inequality_lab.hpp"

#ifndef CDFLOW_VERSION
#define CDFLOW_VERSION "0.0.0"
#endif

namespace cdflow {

using Json = nlohmann::ordered_json;

inline constexpr const char* version() { return CDFLOW_VERSION; }

// Non-finite values become null (JSON has no infinities).
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

inline Json weight_json(const WeightFunction& w) {
  Json j;
  j["family"] = to_string(w.family());
  j["coefficients"] = w.even_coefficients();
  j["c"] = w.convexity();
  return j;
}

inline Json grid_json(const MeasureSpec& m) {
  Json j;
  j["kind"] = std::string(to_string(m.grid->kind()));
  j["R"] = m.R;
  j["N"] = m.grid->size();
  j["Z"] = m.Z;
  j["tail_bound"] = number(m.tail_bound);
  j["quadrature_error"] = m.quadrature_error;
  return j;
}

inline Json to_json(const CDCertificate& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["rho"] = c.rho;
  j["n"] = c.n;
  j["min_slack"] = number(c.min_slack);
  j["argmin_x"] = c.argmin_x;
  j["at_infinity"] = c.at_infinity;
  j["method"] = to_string(c.method);
  return j;
}

inline Json to_json(const FrontierResult& f) {
  Json j;
  j["best_constant"] = f.best_constant;
  j["rho_star"] = f.rho_star;
  j["n_star"] = f.n_star;
  j["method"] = to_string(f.method);
  j["certificate"] = to_json(f.certificate);
  return j;
}

inline Json to_json(const ConstantReport& r) {
  Json j;
  j["name"] = r.name;
  Json in = Json::object();
  for (const auto& [k, v] : r.inputs) in[k] = v;
  j["inputs"] = in;
  j["value"] = number(r.value);
  j["validity"] = r.validity;
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

inline Json to_json(const GapReport& g) {
  Json j;
  j["gap"] = g.gap;
  j["bisection"] = g.bisection;
  j["predicted"] = number(g.predicted);
  j["rel_error"] = number(g.rel_error);
  j["sign_changes"] = g.sign_changes;
  j["iterations"] = g.iterations;
  j["orthogonality"] = g.orthogonality;
  return j;
}

inline Json to_json(const BecknerReport& b) {
  Json j;
  j["p"] = b.p;
  j["theoretical_C"] = b.theoretical_C;
  j["source"] = to_string(b.source);
  j["weighted"] = b.weighted;
  j["worst_quotient"] = number(b.worst_quotient);
  j["violations"] = b.violations;
  j["trials"] = b.trials;
  j["redraws"] = b.redraws;
  j["tol_q"] = b.tol_q;
  if (b.theta) {
    j["theta"] = *b.theta;
    j["refined_violations"] = b.refined_violations;
    j["worst_refined_quotient"] = number(b.worst_refined_quotient);
    j["monotone_failures"] = b.monotone_failures;
  }
  return j;
}

inline Json flow_summary(const FlowTrace& tr, bool decay_ok, bool refined_ok) {
  Json j;
  j["decay_ok"] = decay_ok;
  j["refined_ok"] = refined_ok;
  j["min_residual"] = number(tr.min_relative(tr.residual_linear));
  j["min_residual_refined"] = number(tr.min_relative(tr.residual_refined));
  j["K"] = tr.K;
  j["theta"] = tr.theta;
  j["entropy"] = tr.entropy.name();
  if (tr.entropy.kind == EntropyKind::power) j["p"] = tr.entropy.p;
  j["records"] = tr.size();
  double drift = 0.0;
  for (double m : tr.mass) drift = std::max(drift, std::abs(m - tr.mass.front()));
  j["mass_drift"] = drift / std::max(std::abs(tr.mass.front()), 1e-300);
  j["lambda_final"] = tr.lambda.back();
  j["status"] = tr.diagnostic ? "diagnostic" : "ok";
  return j;
}

inline void write_flow_csv(std::ostream& os, const FlowTrace& tr) {
  os.precision(17);
  os << "t,lambda,lambda1,lambda2,residual_linear,residual_refined,mass\n";
  for (std::size_t i = 0; i < tr.size(); ++i)
    os << tr.times[i] << ',' << tr.lambda[i] << ',' << tr.lambda1[i] << ',' << tr.lambda2[i] << ','
       << tr.residual_linear[i] << ',' << tr.residual_refined[i] << ',' << tr.mass[i] << '\n';
}

inline void write_grid_csv(std::ostream& os, const GridFunction& f) {
  os.precision(17);
  os << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << f.grid->node(i) << ',' << f.values[i] << '\n';
}

}  // namespace cdflow
