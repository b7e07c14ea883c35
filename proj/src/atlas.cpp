#include "extcalc/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "extcalc/errors.hpp"
#include "extcalc/kernels.hpp"
#include "extcalc/zero.hpp"

namespace extcalc {

void Chart::validate() const {
  if (dim < 1) throw DimensionError("chart " + name + " needs dimension >= 1");
  if (box.size() != static_cast<std::size_t>(dim)) {
    throw DimensionError("chart " + name + " has " + std::to_string(box.size()) + " box intervals for dimension " +
                         std::to_string(dim));
  }
  for (const auto& [lo, hi] : box) {
    if (!(lo <= hi)) throw DimensionError("chart " + name + " has an empty box interval");
  }
  for (const auto& g : guards) {
    if (g.expr.max_variable() > dim) throw DimensionError("chart " + name + " guard references a missing coordinate");
  }
}

bool Chart::admits(std::span<const double> p) const {
  if (p.size() != box.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= box[i].first && p[i] <= box[i].second)) return false;
  }
  for (const auto& g : guards) {
    try {
      if (!(std::abs(evaluate(g.expr, p)) >= g.min_abs)) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

const DifferentialForm& AtlasForm::on(const std::string& chart) const {
  auto it = charts.find(chart);
  if (it == charts.end()) throw ReferenceError("atlas form " + name + " has no form on chart " + chart);
  return it->second;
}

DifferentialForm transform_coefficients(const DifferentialForm& w_U, const Transition& t) {
  return pullback(t.forward, w_U);
}

Decomposition decompose_I_II(const DifferentialForm& w_U, const Transition& t) {
  const SmoothMap& F = t.forward;
  if (w_U.dim() != F.target_dim()) {
    throw DimensionError("form in dimension " + std::to_string(w_U.dim()) + " does not live on the target of " +
                         t.name);
  }
  const int m = F.source_dim();
  const int k = w_U.degree();
  Decomposition out{DifferentialForm(m, k + 1), DifferentialForm(m, k + 1), {}};
  if (k + 1 > m || w_U.is_zero()) return out;

  const ExpressionMatrix jac = jacobian_matrix(F);
  std::vector<std::pair<IndexSet, Expression>> composed;
  for (const auto& [I, a] : w_U.coefficients()) composed.emplace_back(I, substitute(a, F.components()));

  std::map<IndexSet, std::vector<Expression>> tensorial;
  for (const auto& J : standard_tuples(m, k)) {
    for (const auto& [I, a] : composed) {
      const Expression minor = jacobian_minor(jac, I, J);
      for (int s = 1; s <= m; ++s) {
        if (J.contains(s)) continue;
        const Insertion ins = insertion_sign(s, J);
        const Expression sign = Expression::number(ins.sign);
        const IndexSet key = J.with(s);
        Expression da = partial(a, s);
        if (!da.is_zero() && !minor.is_zero()) {
          tensorial[key].push_back(Expression::product({sign, da, minor}));
        }
        Expression dminor = partial(minor, s);
        if (!dminor.is_zero() && !a.is_zero()) {
          out.II_terms[key].push_back(Expression::product({sign, a, dminor}));
        }
      }
    }
  }
  DifferentialForm::Coefficients ci;
  for (auto& [key, ts] : tensorial) ci.emplace(key, Expression::sum(std::move(ts)));
  DifferentialForm::Coefficients cii;
  for (const auto& [key, ts] : out.II_terms) cii.emplace(key, Expression::sum(ts));
  out.I = DifferentialForm(m, k + 1, std::move(ci));
  out.II = DifferentialForm(m, k + 1, std::move(cii));
  return out;
}

SplitCheck check_split_exact(const DifferentialForm& w_U, const Transition& t, std::size_t max_terms) {
  const DifferentialForm total = exterior_derivative(transform_coefficients(w_U, t));
  const Decomposition dec = decompose_I_II(w_U, t);
  std::set<IndexSet> keys;
  for (const auto* f : {&total, &dec.I, &dec.II}) {
    for (const auto& [key, c] : f->coefficients()) keys.insert(key);
  }
  SplitCheck out;
  out.exact = true;
  out.keys = keys.size();
  for (const auto& key : keys) {
    Expression diff = total.coefficient(key) - (dec.I.coefficient(key) + dec.II.coefficient(key));
    auto e = expand(diff, max_terms);
    if (!e) {
      out.expanded = false;
      out.exact = false;
      continue;
    }
    out.exact = out.exact && e->is_zero();
  }
  return out;
}

std::vector<Point> sample_overlap(const Transition& t, const Chart& from, const Chart& to, std::size_t count,
                                  SplitMix64& rng, std::size_t attempts_per_sample) {
  from.validate();
  to.validate();
  if (t.forward.source_dim() != from.dim || t.forward.target_dim() != to.dim) {
    throw DimensionError("transition " + t.name + " does not map chart " + from.name + " into " + to.name);
  }
  std::vector<Point> out;
  const std::size_t budget = std::max<std::size_t>(count, 1) * attempts_per_sample;
  std::size_t drawn = 0;
  while (out.size() < count) {
    if (drawn++ >= budget) {
      throw SamplingError("found only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                          " overlap points for " + t.name);
    }
    Point y = draw_point(from.box, rng);
    if (!from.admits(y)) continue;
    Point x;
    try {
      x = t.forward(y);
    } catch (const DomainError&) {
      continue;
    }
    if (!to.admits(x)) continue;
    out.push_back(std::move(y));
  }
  return out;
}

namespace {

std::vector<Point> sample_valid_overlap(const Transition& t, const Chart& from, const Chart& to,
                                        const Tape& tape, std::size_t count, SplitMix64& rng,
                                        std::size_t attempts_per_sample) {
  std::vector<Point> out;
  std::size_t rounds = 0;
  while (out.size() < count) {
    if (++rounds > attempts_per_sample) {
      throw SamplingError("residual expressions undefined at too many overlap points of " + t.name);
    }
    auto batch = sample_overlap(t, from, to, count - out.size(), rng, attempts_per_sample);
    BatchValues vals = evaluate_batch(tape, batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (vals.valid[i]) out.push_back(std::move(batch[i]));
    }
  }
  return out;
}

}  // namespace

ConsistencyReport check_well_defined(const AtlasForm& af, const Transition& t, const Chart& from,
                                     const Chart& to, const ConsistencyOptions& opts) {
  if (opts.samples == 0) throw std::invalid_argument("need at least one sample");
  const DifferentialForm& w_U = af.on(t.to);
  const DifferentialForm& w_V = af.on(t.from);
  if (w_U.dim() != to.dim || w_V.dim() != from.dim) {
    throw DimensionError("atlas form " + af.name + " does not match the chart dimensions of " + t.name);
  }
  if (w_U.degree() != w_V.degree()) throw DimensionError("atlas form " + af.name + " mixes degrees");

  ConsistencyReport r;
  r.form = af.name;
  r.transition = t.name;
  r.from = t.from;
  r.to = t.to;
  r.degree = w_V.degree() + 1;
  r.seed = opts.seed;
  r.tolerance = opts.tolerance;

  const DifferentialForm lhs = exterior_derivative(w_V);
  const DifferentialForm rhs = transform_coefficients(exterior_derivative(w_U), t);
  const Decomposition dec = decompose_I_II(w_U, t);

  std::set<IndexSet> keys;
  for (const auto& [key, c] : lhs.coefficients()) keys.insert(key);
  for (const auto& [key, c] : rhs.coefficients()) keys.insert(key);

  std::vector<Expression> roots;
  std::vector<ResidualGroup> groups;
  std::vector<IndexSet> group_keys;
  for (const auto& key : keys) {
    ResidualGroup g;
    g.roots = {roots.size(), roots.size() + 1};
    g.signs = {1.0, -1.0};
    roots.push_back(lhs.coefficient(key));
    roots.push_back(rhs.coefficient(key));
    groups.push_back(std::move(g));
    group_keys.push_back(key);
  }
  const std::size_t n_consistency = groups.size();
  for (const auto& [key, ts] : dec.II_terms) {
    ResidualGroup g;
    for (const auto& e : ts) {
      g.roots.push_back(roots.size());
      g.signs.push_back(1.0);
      roots.push_back(e);
    }
    groups.push_back(std::move(g));
  }
  r.ii_structural = dec.II.is_zero();

  Tape tape(roots);
  SplitMix64 rng(opts.seed);
  const auto points = sample_valid_overlap(t, from, to, tape, opts.samples, rng, opts.attempts_per_sample);
  const ResidualScan scan = scan_residuals(tape, groups, points);
  r.samples = scan.valid_points;

  for (std::size_t g = 0; g < n_consistency; ++g) {
    r.per_key[group_keys[g]] = scan.max_scaled[g];
    r.max_residual = std::max(r.max_residual, scan.max_scaled[g]);
  }
  for (std::size_t g = n_consistency; g < groups.size(); ++g) {
    r.ii_residual = std::max(r.ii_residual, scan.max_scaled[g]);
  }
  r.pass = r.max_residual <= opts.tolerance && r.ii_residual <= opts.tolerance;
  return r;
}

double round_trip_residual(const Transition& t, const Chart& from, const Chart& to, std::size_t samples,
                           std::uint64_t seed) {
  if (!t.inverse) throw std::invalid_argument("transition " + t.name + " has no inverse");
  Transition back{t.name + "^-1", t.to, t.from, *t.inverse, t.forward};
  const SmoothMap round = compose(t.forward, *t.inverse);
  SplitMix64 rng(seed);
  const auto points = sample_overlap(back, to, from, samples, rng);
  double worst = 0.0;
  for (const auto& x : points) {
    const Point y = round(x);
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
  }
  return worst;
}

nlohmann::json to_json(const ConsistencyReport& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [key, v] : r.per_key) table.push_back({{"key", to_string(key)}, {"residual", v}});
  return {{"form", r.form},
          {"transition", r.transition},
          {"from", r.from},
          {"to", r.to},
          {"degree", r.degree},
          {"samples", r.samples},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"residuals", table},
          {"max_residual", r.max_residual},
          {"ii_residual", r.ii_residual},
          {"ii_structural", r.ii_structural},
          {"verdict", r.pass ? "pass" : "fail"}};
}

std::string to_text(const ConsistencyReport& r) {
  auto sci = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  std::string out;
  out += "consistency of d(" + r.form + ") across " + r.transition + " (" + r.from + " -> " + r.to + ")\n";
  out += "samples: " + std::to_string(r.samples) + "  seed: " + std::to_string(r.seed) + "  tolerance: " +
         sci(r.tolerance) + "\n";
  if (r.per_key.empty()) out += "  (both sides are the zero " + std::to_string(r.degree) + "-form)\n";
  for (const auto& [key, v] : r.per_key) out += "  " + to_string(key) + "  residual " + sci(v) + "\n";
  out += "max residual: " + sci(r.max_residual) + "\n";
  out += "II residual: " + sci(r.ii_residual) + (r.ii_structural ? " (structural zero)" : "") + "\n";
  out += std::string("verdict: ") + (r.pass ? "pass" : "fail") + "\n";
  return out;
}

}  // namespace extcalc
