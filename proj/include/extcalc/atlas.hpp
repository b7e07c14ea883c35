#pragma once

// Charts, transitions and overlap consistency of the exterior derivative.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "extcalc/form.hpp"
#include "extcalc/random.hpp"
#include "extcalc/smooth_map.hpp"

namespace extcalc {

/// |expr| ≥ min_abs must hold at a sample point.
struct Guard {
  Expression expr;
  double min_abs = 0.0;
};

struct Chart {
  std::string name;
  int dim = 1;
  Box box;
  std::vector<Guard> guards;

  /// Throws DimensionError unless dim ≥ 1 and the box has dim non-empty intervals.
  void validate() const;
  /// Inside the box and every guard satisfied; false where a guard is undefined.
  bool admits(std::span<const double> p) const;
};

/// forward maps from-chart coordinates y to to-chart coordinates x.
struct Transition {
  std::string name;
  std::string from;
  std::string to;
  SmoothMap forward;
  std::optional<SmoothMap> inverse;
};

struct AtlasForm {
  std::string name;
  int degree = 0;
  std::map<std::string, DifferentialForm> charts;

  /// Throws ReferenceError when the chart has no form.
  const DifferentialForm& on(const std::string& chart) const;
};

/// Coefficients of w_U in the from-chart of t: pullback along t.forward.
DifferentialForm transform_coefficients(const DifferentialForm& w_U, const Transition& t);

/// d(F*w_U) split by the product rule. I carries the derivatives of the
/// composed coefficients, II the derivatives of the Jacobian minors.
struct Decomposition {
  DifferentialForm I;
  DifferentialForm II;
  /// Unsimplified summands of each II coefficient, for zero recognition.
  std::map<IndexSet, std::vector<Expression>> II_terms;
};

Decomposition decompose_I_II(const DifferentialForm& w_U, const Transition& t);

/// Outcome of comparing d(F*w_U) with I + II by full expansion.
struct SplitCheck {
  bool exact = false;     // every key expanded to the 0 literal
  bool expanded = true;   // false when some key exceeded the expansion cap
  std::size_t keys = 0;
};

SplitCheck check_split_exact(const DifferentialForm& w_U, const Transition& t,
                             std::size_t max_terms = 20000);

struct ConsistencyOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::size_t attempts_per_sample = 50;
};

struct ConsistencyReport {
  std::string form;
  std::string transition;
  std::string from;
  std::string to;
  int degree = 0;  // degree of the compared derivative
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::map<IndexSet, double> per_key;  // max scaled residual
  double max_residual = 0.0;
  double ii_residual = 0.0;
  bool ii_structural = false;
  bool pass = false;
};

/// Points of the from-chart whose image under t.forward lies in the to-chart.
/// Throws SamplingError after count·attempts_per_sample rejected candidates.
std::vector<Point> sample_overlap(const Transition& t, const Chart& from, const Chart& to, std::size_t count,
                                  SplitMix64& rng, std::size_t attempts_per_sample = 50);

/// Compares d(w_V) with F*(d w_U) at seeded overlap points and zero-tests
/// II from decompose_I_II. Throws ReferenceError if `af` lacks either chart
/// and std::invalid_argument for zero samples.
ConsistencyReport check_well_defined(const AtlasForm& af, const Transition& t, const Chart& from,
                                     const Chart& to, const ConsistencyOptions& opts = {});

/// Largest |x - forward(inverse(x))| over seeded to-chart points whose
/// preimage lies in the from-chart. Requires t.inverse.
double round_trip_residual(const Transition& t, const Chart& from, const Chart& to, std::size_t samples,
                           std::uint64_t seed);

nlohmann::json to_json(const ConsistencyReport& r);
std::string to_text(const ConsistencyReport& r);

}  // namespace extcalc
