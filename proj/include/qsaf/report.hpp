#pragma once

// Aggregated analysis of one system. Every number carries the tolerance it was
// certified under, as {"value": v, "tolerance": t}.

#include <cstddef>
#include <string>

#include <json.hpp>

#include "qsaf/config.hpp"
#include "qsaf/self_affine.hpp"

namespace qsaf {

using Json = nlohmann::ordered_json;

struct AnalysisOptions {
  std::size_t witness_samples = 64;
  std::size_t witness_depth = 64;
  double level_tolerance = 1e-10;
};

inline constexpr double kClosedFormTolerance = 1e-12;

Json analyze(const SystemConfig& config, const SelfAffineSystem& system,
             const AnalysisOptions& options = {});

std::string render_json(const Json& report);
// One "path: value" line per leaf, floats at 17 significant digits.
std::string render_text(const Json& report);

}  // namespace qsaf
