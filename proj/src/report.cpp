#include "qsaf/report.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsaf/extrema_levels.hpp"
#include "qsaf/holder.hpp"

namespace qsaf {

namespace {

Json certified(double value, double tolerance) {
  return Json{{"value", value}, {"tolerance", tolerance}};
}

Json digit_array(const std::vector<Digit>& digits) {
  Json out = Json::array();
  for (Digit d : digits) out.push_back(d);
  return out;
}

Json exponent_entry(const HolderReport& r) {
  Json out = certified(r.exponent, kClosedFormTolerance);
  if (r.critical_exponent_undetermined) out["at_critical_exponent"] = "undetermined";
  return out;
}

void flatten(const Json& node, const std::string& path, std::string& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      flatten(child, path.empty() ? key : path + "." + key, out);
    }
    return;
  }
  if (node.is_array() && !node.empty() && (node.front().is_object() || node.front().is_array())) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], path + "[" + std::to_string(i) + "]", out);
    }
    return;
  }
  out += path;
  out += ": ";
  if (node.is_array()) {
    out += '[';
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (i > 0) out += ", ";
      const Json& v = node[i];
      out += v.is_number_float() ? format_real(v.get<double>()) : v.dump();
    }
    out += ']';
  } else if (node.is_number_float()) {
    out += format_real(node.get<double>());
  } else if (node.is_string()) {
    out += node.get<std::string>();
  } else {
    out += node.dump();
  }
  out += '\n';
}

}  // namespace

Json analyze(const SystemConfig& config, const SelfAffineSystem& system,
             const AnalysisOptions& options) {
  Json report;
  report["system"] = {{"label", config.label},
                      {"s", system.size()},
                      {"q", config.q_text},
                      {"g", config.g_text}};

  const auto& g = system.g();
  const auto coeffs = g.coefficients();
  const bool increasing = std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v > 0; });
  const auto branch = overshoot_branch(system);
  Json predicates;
  predicates["monotone"] = increasing;
  predicates["singular"] = singularity_predicate(system);
  predicates["nowhere_differentiable"] = nowhere_differentiable_predicate(system);
  predicates["overshoot_branch"] = branch ? Json(*branch) : Json(nullptr);
  report["predicates"] = predicates;

  const BoundsPair& b = system.bounds();
  const double c = g.max_abs();
  const double oracle_tol = std::max(b.residual * c / (1.0 - c), kBoundsStepTolerance);
  Json bounds;
  if (branch) {
    const MaximumResult max = closed_form_max(system);
    bounds["m"] = certified(closed_form_min(system), kOracleAgreement);
    bounds["M"] = certified(max.value, kOracleAgreement);
    bounds["source"] = "closed-form";
  } else {
    bounds["m"] = certified(b.lower, oracle_tol);
    bounds["M"] = certified(b.upper, oracle_tol);
    bounds["source"] = "oracle";
  }
  bounds["oracle_iterations"] = b.iterations;
  report["bounds"] = bounds;

  report["exponents"] = {{"global", exponent_entry(global_exponent(system))},
                         {"almost_everywhere", exponent_entry(almost_everywhere_exponent(system))},
                         {"binary_points", exponent_entry(local_exponent_binary(system))}};

  std::vector<double> levels;
  for (std::size_t i = 0; i < system.size(); ++i) {
    levels.push_back(fixed_point_value(system, static_cast<Digit>(i)));
  }
  std::sort(levels.begin(), levels.end());
  Json table = Json::array();
  double last = -HUGE_VAL;
  for (double y : levels) {
    if (y - last <= options.level_tolerance) continue;
    last = y;
    const LevelSetDescriptor ls = level_set(system, y, options.level_tolerance);
    table.push_back({{"y", certified(y, options.level_tolerance)},
                     {"V", digit_array(ls.digits)},
                     {"continuum", ls.continuum}});
  }
  report["levels"] = table;

  if (branch) {
    const CantorSpec spec = maxima_set(system);
    report["maxima_set"] = {{"allowed", digit_array(spec.allowed)},
                            {"dimension", certified(spec.dimension, kMoranTolerance)},
                            {"singleton", spec.singleton}};
    const NonInvarianceCertificate cert =
        non_invariance_certificate(system, options.witness_samples, options.witness_depth);
    report["non_invariance"] = {
        {"allowed", digit_array(cert.allowed)},
        {"dimension", certified(cert.dimension, kMoranTolerance)},
        {"samples", cert.witnesses.size()},
        {"depth", cert.depth},
        {"max_residual", cert.max_residual},
        {"bound", preimage_bound(system, cert.depth)},
        {"rounding", preimage_rounding(system, cert.depth)},
        {"all_within_bound", cert.all_within_bound}};
  }
  return report;
}

std::string render_json(const Json& report) { return report.dump(2) + "\n"; }

std::string render_text(const Json& report) {
  std::string out;
  flatten(report, "", out);
  return out;
}

}  // namespace qsaf
