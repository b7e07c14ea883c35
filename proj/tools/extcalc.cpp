// extcalc: compute and verify exterior derivatives from the command line.
//
// Exit codes: 0 computed or verified, 1 verification failed, 2 usage, parse
// or reference error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "extcalc/atlas.hpp"
#include "extcalc/errors.hpp"
#include "extcalc/form.hpp"
#include "extcalc/lemma.hpp"
#include "extcalc/manifest.hpp"
#include "extcalc/random.hpp"
#include "extcalc/smooth_map.hpp"

using namespace extcalc;

namespace {

struct Globals {
  bool json = false;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  double tolerance = 1e-8;
  bool trace = false;
};

// Usage problems detected after CLI11 has parsed the arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json form_json(const DifferentialForm& w) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [key, c] : w.coefficients()) {
    coeffs.push_back({{"key", to_string(key)}, {"coefficient", to_string(c)}});
  }
  return {{"dim", w.dim()}, {"degree", w.degree()}, {"form", to_string(w)}, {"coefficients", coeffs}};
}

int print_form(const DifferentialForm& w, const Globals& g) {
  if (g.json) {
    std::cout << form_json(w).dump(2) << "\n";
  } else {
    std::cout << to_string(w) << "\n";
  }
  return 0;
}

// Forms come either from a manifest (path, name...) or, with --dim, as
// literal form text.
std::vector<DifferentialForm> resolve_forms(const std::vector<std::string>& args, std::optional<int> dim,
                                            std::size_t count) {
  std::vector<DifferentialForm> out;
  if (dim) {
    if (args.size() != count) throw UsageError("expected " + std::to_string(count) + " form text argument(s)");
    for (const auto& text : args) out.push_back(parse_form(text, *dim));
    return out;
  }
  if (args.size() != count + 1) throw UsageError("expected a manifest path and " + std::to_string(count) + " form name(s)");
  const Manifest m = load_manifest(args[0]);
  for (std::size_t i = 1; i < args.size(); ++i) out.push_back(m.form(args[i]));
  return out;
}

int cmd_d(const std::vector<std::string>& args, std::optional<int> dim, const Globals& g) {
  return print_form(exterior_derivative(resolve_forms(args, dim, 1)[0]), g);
}

int cmd_wedge(const std::vector<std::string>& args, std::optional<int> dim, const Globals& g) {
  auto forms = resolve_forms(args, dim, 2);
  return print_form(wedge(forms[0], forms[1]), g);
}

int cmd_pullback(const std::string& path, const std::string& map_name, const std::string& form_name,
                 const Globals& g) {
  const Manifest m = load_manifest(path);
  return print_form(pullback(m.map(map_name), m.form(form_name)), g);
}

std::vector<Expression> parse_phis(const std::vector<std::string>& texts) {
  std::vector<Expression> out;
  for (const auto& t : texts) out.push_back(simplify(parse(t)));
  return out;
}

void check_shape(int n, int k) {
  if (n < 1 || k < 1 || k > n || k > kMaxLemmaDegree) {
    throw UsageError("need 1 <= k <= min(n, " + std::to_string(kMaxLemmaDegree) + "), got n=" +
                     std::to_string(n) + " k=" + std::to_string(k));
  }
}

int cmd_verify_lemma(int n, int k, const std::vector<std::string>& phi_texts, std::optional<std::size_t> random,
                     const Globals& g) {
  LemmaCheckOptions opts;
  opts.samples = g.samples;
  opts.seed = g.seed;
  opts.tolerance = g.tolerance;
  if (opts.samples == 0) throw UsageError("need at least one sample");

  if (random) {
    if (!phi_texts.empty()) throw UsageError("--phi and --random are exclusive");
    const bool fixed = n > 0 || k > 0;
    if (fixed) check_shape(n, k);
    SplitMix64 rng(g.seed);
    std::size_t passed = 0;
    nlohmann::json runs = nlohmann::json::array();
    std::string failures;
    for (std::size_t i = 0; i < *random; ++i) {
      int ni = n, ki = k;
      if (!fixed) {
        ni = rng.uniform_int(2, 6);
        ki = rng.uniform_int(1, std::min(ni, kMaxLemmaDegree));
      }
      RandomExpressionOptions ro;
      ro.dim = ni;
      std::vector<Expression> phis;
      for (int j = 0; j < ki; ++j) phis.push_back(random_expression(ro, rng));
      LemmaCheckOptions io = opts;
      io.seed = rng.next();
      const LemmaReport r = verify_lemma(phis, ni, io);
      if (r.pass) {
        ++passed;
      } else {
        failures += "instance " + std::to_string(i) + " failed: n=" + std::to_string(ni) + " k=" +
                    std::to_string(ki) + "\n";
      }
      nlohmann::json phi_json = nlohmann::json::array();
      for (const auto& p : phis) phi_json.push_back(to_string(simplify(p)));
      runs.push_back({{"n", ni}, {"k", ki}, {"phi", phi_json}, {"seed", io.seed}, {"verdict", r.pass ? "pass" : "fail"}});
    }
    const bool ok = passed == *random;
    if (g.json) {
      std::cout << nlohmann::json{{"seed", g.seed},
                                  {"instances", *random},
                                  {"passed", passed},
                                  {"runs", runs},
                                  {"verdict", ok ? "pass" : "fail"}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << failures;
      std::cout << "random instances: " << passed << "/" << *random << " passed  seed: " << g.seed << "\n";
      std::cout << "verdict: " << (ok ? "pass" : "fail") << "\n";
    }
    return ok ? 0 : 1;
  }

  if (n == 0) throw UsageError("--n is required");
  const auto phis = parse_phis(phi_texts);
  if (k == 0) k = static_cast<int>(phis.size());
  check_shape(n, k);
  if (phis.size() != static_cast<std::size_t>(k)) {
    throw UsageError("expected " + std::to_string(k) + " --phi expressions, got " + std::to_string(phis.size()));
  }
  for (const auto& p : phis) {
    if (p.max_variable() > n) throw UsageError("phi " + to_string(p) + " uses a coordinate beyond z" + std::to_string(n));
  }
  std::vector<LemmaTerm> terms;
  const LemmaReport r = verify_lemma(phis, n, opts, &terms);
  if (g.json) {
    nlohmann::json j = to_json(r);
    if (g.trace) {
      nlohmann::json tj = nlohmann::json::array();
      for (const auto& t : terms) tj.push_back(to_text(t));
      j["term_list"] = tj;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_text(r, g.trace ? std::span<const LemmaTerm>(terms) : std::span<const LemmaTerm>());
  }
  return r.pass ? 0 : 1;
}

int cmd_expand_lemma(int n, const std::vector<std::string>& phi_texts, const Globals& g) {
  const auto phis = parse_phis(phi_texts);
  check_shape(n, static_cast<int>(phis.size()));
  const auto terms = expand_lemma_terms(phis, n);
  if (g.json) {
    nlohmann::json tj = nlohmann::json::array();
    for (const auto& t : terms) {
      tj.push_back({{"s", t.pair.s},
                    {"J", to_string(t.pair.J)},
                    {"p", t.p},
                    {"q", t.q},
                    {"sign", t.sign},
                    {"key", to_string(t.key)},
                    {"value", to_string(simplify(t.value))}});
    }
    std::cout << nlohmann::json{{"n", n}, {"k", phis.size()}, {"terms", tj}}.dump(2) << "\n";
  } else {
    std::cout << "terms: " << terms.size() << "\n";
    for (std::size_t i = 0; i < terms.size(); ++i) std::cout << "  [" << i << "] " << to_text(terms[i]) << "\n";
  }
  return 0;
}

int cmd_verify_consistency(const std::string& path, const std::string& form_name, const std::string& transition,
                           const Globals& g) {
  if (g.samples == 0) throw UsageError("need at least one sample");
  const Manifest m = load_manifest(path);
  const AtlasForm& af = m.atlas_form(form_name);
  const Transition& t = m.transition(transition);
  ConsistencyOptions opts;
  opts.samples = g.samples;
  opts.seed = g.seed;
  opts.tolerance = g.tolerance;
  const ConsistencyReport r = check_well_defined(af, t, m.chart(t.from), m.chart(t.to), opts);
  if (g.json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::cout << to_text(r);
  }
  return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic exterior calculus: derivatives, pullbacks and their verification"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Print JSON instead of text");
  app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--samples", g.samples, "Sample points for numeric checks")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "Scaled residual tolerance")->capture_default_str();
  app.add_flag("--trace", g.trace, "Show every lemma term and its partner");

  std::vector<std::string> d_args;
  std::optional<int> d_dim;
  auto* d = app.add_subcommand("d", "Exterior derivative of a form")->fallthrough();
  d->add_option("args", d_args, "MANIFEST FORM, or FORM-TEXT with --dim")->required();
  d->add_option("--dim", d_dim, "Read the form as literal text in this dimension");

  std::vector<std::string> w_args;
  std::optional<int> w_dim;
  auto* w = app.add_subcommand("wedge", "Wedge product of two forms")->fallthrough();
  w->add_option("args", w_args, "MANIFEST A B, or A-TEXT B-TEXT with --dim")->required();
  w->add_option("--dim", w_dim, "Read the forms as literal text in this dimension");

  std::string pb_path, pb_map, pb_form;
  auto* pb = app.add_subcommand("pullback", "Pullback of a form along a map")->fallthrough();
  pb->add_option("manifest", pb_path)->required();
  pb->add_option("map", pb_map)->required();
  pb->add_option("form", pb_form)->required();

  int vl_n = 0, vl_k = 0;
  std::vector<std::string> vl_phi;
  std::optional<std::size_t> vl_random;
  auto* vl = app.add_subcommand("verify-lemma", "Expand, pair and zero-test the cancellation identity")->fallthrough();
  vl->add_option("--n", vl_n, "Ambient dimension");
  vl->add_option("--k", vl_k, "Number of functions");
  vl->add_option("--phi", vl_phi, "A function phi_i (repeat k times)");
  vl->add_option("--random", vl_random, "Check this many seeded random instances");

  int el_n = 0;
  std::vector<std::string> el_phi;
  auto* el = app.add_subcommand("expand-lemma", "List the signed monomials of the identity")->fallthrough();
  el->add_option("--n", el_n, "Ambient dimension")->required();
  el->add_option("--phi", el_phi, "A function phi_i (repeat k times)")->required();

  std::string vc_path, vc_form, vc_transition;
  auto* vc = app.add_subcommand("verify-consistency", "Check d of an atlas form across a transition")->fallthrough();
  vc->add_option("manifest", vc_path)->required();
  vc->add_option("atlasform", vc_form)->required();
  vc->add_option("transition", vc_transition)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (d->parsed()) return cmd_d(d_args, d_dim, g);
    if (w->parsed()) return cmd_wedge(w_args, w_dim, g);
    if (pb->parsed()) return cmd_pullback(pb_path, pb_map, pb_form, g);
    if (vl->parsed()) return cmd_verify_lemma(vl_n, vl_k, vl_phi, vl_random, g);
    if (el->parsed()) return cmd_expand_lemma(el_n, el_phi, g);
    if (vc->parsed()) return cmd_verify_consistency(vc_path, vc_form, vc_transition, g);
  } catch (const std::exception& e) {
    std::cerr << "extcalc: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
