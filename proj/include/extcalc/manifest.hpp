#pragma once

// Line-oriented manifest files describing forms, maps, charts, transitions
// and atlas forms.
//
//   # comment
//   [dim]
//   n = 2
//   [scalar]
//   f = z1*z2
//   [form]
//   w = z1 d z2                       # dimension from [dim], degree inferred
//   v (2, 1) = z1*cos(z2) dz1         # explicit (dimension, degree)
//   [map]
//   polar (2 -> 2) = z1*cos(z2); z1*sin(z2)
//   [chart]
//   cart (2) box [-2, 2] x [-2, 2]
//   pol (2) box [0.1, 1.4] x [-3, 3] guard z1 >= 0.1
//   [transition]
//   pc : pol -> cart by polar          # optional: inverse <map>
//   [atlasform]
//   omega = cart: w, pol: w via pc     # "via" transports along a transition
//
// Names must be declared before they are referenced.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "extcalc/atlas.hpp"
#include "extcalc/form.hpp"
#include "extcalc/smooth_map.hpp"

namespace extcalc {

class ManifestError : public std::runtime_error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Manifest {
  int dim = 0;  // 0 until [dim] is given
  std::map<std::string, Expression> scalars;
  std::map<std::string, DifferentialForm> forms;
  std::map<std::string, SmoothMap> maps;
  std::map<std::string, Chart> charts;
  std::map<std::string, Transition> transitions;
  std::map<std::string, AtlasForm> atlas_forms;

  /// A declared form, or a scalar as a 0-form. Throws ReferenceError("unknown form ...").
  DifferentialForm form(const std::string& name) const;
  const SmoothMap& map(const std::string& name) const;
  const Chart& chart(const std::string& name) const;
  const Transition& transition(const std::string& name) const;
  const AtlasForm& atlas_form(const std::string& name) const;
};

/// Throws ManifestError on syntax, reference or dimension errors.
Manifest parse_manifest(std::string_view text);
/// Throws ManifestError when the file cannot be read.
Manifest load_manifest(const std::string& path);

}  // namespace extcalc
