#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pcs/composite.hpp"

namespace pcs::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Strict-schema helpers: every object is checked against an explicit field
// list so typos and stale fields fail loudly instead of being ignored.
// ---------------------------------------------------------------------------

inline void require_fields(const json& j, const char* what,
                           std::initializer_list<const char*> required,
                           std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw input_error(std::string(what) + " must be an object");
  for (const char* key : required) {
    if (!j.contains(key)) {
      throw input_error(std::string(what) + " is missing field '" + key + "'");
    }
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : required) known = known || item.key() == key;
    for (const char* key : optional) known = known || item.key() == key;
    if (!known) {
      throw input_error("unknown field '" + item.key() + "' in " + what);
    }
  }
}

inline Rational parse_rational_value(const json& j, const char* what) {
  if (!j.is_string()) {
    throw input_error(std::string(what) + R"( must be a rational string like "3/8")");
  }
  return parse_rational(j.get<std::string>());
}

inline std::vector<Rational> parse_rational_array(const json& j, const char* what) {
  if (!j.is_array()) throw input_error(std::string(what) + " must be an array");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(parse_rational_value(item, what));
  return out;
}

inline json serialize_rational_array(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(format_rational(v));
  return out;
}

// ---------------------------------------------------------------------------
// Beliefs and scalar distributions.
// ---------------------------------------------------------------------------

inline Posterior parse_posterior(const json& j, const char* what = "posterior") {
  return Posterior(parse_rational_array(j, what));
}

inline json serialize_posterior(const Posterior& p) {
  return serialize_rational_array(p.weights());
}

inline BeliefDistribution parse_belief(const json& j, const char* what = "distribution") {
  require_fields(j, what, {"atoms"});
  if (!j["atoms"].is_array() || j["atoms"].empty()) {
    throw input_error(std::string(what) + ".atoms must be a nonempty array");
  }
  std::vector<std::pair<Posterior, Rational>> raw;
  for (const auto& atom : j["atoms"]) {
    require_fields(atom, "atom", {"posterior", "weight"});
    raw.emplace_back(parse_posterior(atom["posterior"]),
                     parse_rational_value(atom["weight"], "weight"));
  }
  return BeliefDistribution::make(std::move(raw));
}

inline json serialize_belief(const BeliefDistribution& b) {
  json atoms = json::array();
  for (std::size_t n = 0; n < b.size(); ++n) {
    atoms.push_back({{"posterior", serialize_posterior(b.atom(n))},
                     {"weight", format_rational(b.prob(n))}});
  }
  return {{"atoms", std::move(atoms)}};
}

inline ScalarDistribution parse_scalar(const json& j, const char* what = "distribution") {
  require_fields(j, what, {"atoms"});
  if (!j["atoms"].is_array() || j["atoms"].empty()) {
    throw input_error(std::string(what) + ".atoms must be a nonempty array");
  }
  std::vector<std::pair<Rational, Rational>> raw;
  for (const auto& atom : j["atoms"]) {
    require_fields(atom, "atom", {"value", "weight"});
    raw.emplace_back(parse_rational_value(atom["value"], "value"),
                     parse_rational_value(atom["weight"], "weight"));
  }
  return ScalarDistribution::make(std::move(raw));
}

inline json serialize_scalar(const ScalarDistribution& d) {
  json atoms = json::array();
  for (std::size_t k = 0; k < d.size(); ++k) {
    atoms.push_back({{"value", format_rational(d.value(k))},
                     {"weight", format_rational(d.prob(k))}});
  }
  return {{"atoms", std::move(atoms)}};
}

// ---------------------------------------------------------------------------
// Dilation witnesses.
// ---------------------------------------------------------------------------

inline json serialize_dilation(const Dilation& d) {
  json rows = json::array();
  for (const auto& row : d.rows) {
    json entries = json::array();
    for (const auto& [atom, weight] : row) {
      entries.push_back({{"atom", atom}, {"weight", format_rational(weight)}});
    }
    rows.push_back(std::move(entries));
  }
  return {{"rows", std::move(rows)}};
}

inline Dilation parse_dilation(const json& j) {
  require_fields(j, "dilation", {"rows"});
  Dilation d;
  for (const auto& row : j["rows"]) {
    if (!row.is_array()) throw input_error("dilation rows must be arrays");
    std::vector<std::pair<std::size_t, Rational>> entries;
    for (const auto& entry : row) {
      require_fields(entry, "dilation entry", {"atom", "weight"});
      if (!entry["atom"].is_number_unsigned()) {
        throw input_error("dilation atom indices must be nonnegative integers");
      }
      entries.emplace_back(entry["atom"].get<std::size_t>(),
                           parse_rational_value(entry["weight"], "weight"));
    }
    d.rows.push_back(std::move(entries));
  }
  return d;
}

// ---------------------------------------------------------------------------
// State spaces and privacy specifications.
// ---------------------------------------------------------------------------

inline StateSpace parse_space(const json& j) {
  require_fields(j, "space", {"omega", "theta", "theta_map", "prior"});
  if (!j["omega"].is_array() || !j["theta"].is_array()) {
    throw input_error("space.omega and space.theta must be label arrays");
  }
  std::vector<std::string> omega, theta;
  for (const auto& label : j["omega"]) {
    if (!label.is_string()) throw input_error("state labels must be strings");
    omega.push_back(label.get<std::string>());
  }
  for (const auto& label : j["theta"]) {
    if (!label.is_string()) throw input_error("attribute labels must be strings");
    theta.push_back(label.get<std::string>());
  }
  if (!j["theta_map"].is_object()) {
    throw input_error("space.theta_map must map state labels to attribute labels");
  }
  std::vector<std::size_t> map(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!j["theta_map"].contains(omega[i])) {
      throw input_error("theta_map is missing state '" + omega[i] + "'");
    }
    const auto& target = j["theta_map"][omega[i]];
    if (!target.is_string()) throw input_error("theta_map values must be attribute labels");
    const auto it = std::find(theta.begin(), theta.end(), target.get<std::string>());
    if (it == theta.end()) {
      throw input_error("theta_map sends '" + omega[i] + "' to an unknown attribute");
    }
    map[i] = static_cast<std::size_t>(it - theta.begin());
  }
  if (j["theta_map"].size() != omega.size()) {
    throw input_error("theta_map must list every state exactly once");
  }
  return StateSpace(std::move(omega), std::move(theta), std::move(map),
                    Posterior(parse_rational_array(j["prior"], "space.prior")));
}

inline json serialize_space(const StateSpace& space) {
  json omega = json::array(), theta = json::array(), map = json::object();
  for (std::size_t i = 0; i < space.num_omega(); ++i) {
    omega.push_back(space.omega_label(i));
    map[space.omega_label(i)] = space.theta_label(space.theta_of(i));
  }
  for (std::size_t j2 = 0; j2 < space.num_theta(); ++j2) theta.push_back(space.theta_label(j2));
  return {{"omega", std::move(omega)},
          {"theta", std::move(theta)},
          {"theta_map", std::move(map)},
          {"prior", serialize_posterior(space.prior())}};
}

inline PrivacySpec parse_privacy(const json& j, std::size_t num_theta) {
  if (!j.is_object() || j.size() != 1) {
    throw input_error("privacy must hold exactly one specification variant");
  }
  if (j.contains("single_bound")) {
    auto bound = parse_belief(j["single_bound"], "single_bound");
    if (bound.dim() != num_theta) {
      throw input_error("single_bound atoms must live on the attribute simplex");
    }
    return SingleBound{std::move(bound)};
  }
  if (j.contains("ex_post")) {
    require_fields(j["ex_post"], "ex_post", {"rows"});
    if (!j["ex_post"]["rows"].is_array()) throw input_error("ex_post.rows must be an array");
    LinearSystem rows(num_theta);
    for (const auto& row : j["ex_post"]["rows"]) {
      require_fields(row, "ex_post row", {"coeffs", "rel", "rhs"});
      auto coeffs = parse_rational_array(row["coeffs"], "coeffs");
      if (coeffs.size() != num_theta) {
        throw input_error("ex_post row length must match the attribute count");
      }
      auto rhs = parse_rational_value(row["rhs"], "rhs");
      if (!row["rel"].is_string()) throw input_error("ex_post rel must be \"le\" or \"eq\"");
      const auto rel = row["rel"].get<std::string>();
      if (rel == "le") {
        rows.add_ineq(std::move(coeffs), std::move(rhs));
      } else if (rel == "eq") {
        rows.add_eq(std::move(coeffs), std::move(rhs));
      } else {
        throw input_error("ex_post rel must be \"le\" or \"eq\"");
      }
    }
    return ex_post_spec(std::move(rows));
  }
  if (j.contains("inferential")) {
    require_fields(j["inferential"], "inferential", {"lambda"});
    return Inferential{parse_rational_value(j["inferential"]["lambda"], "lambda")};
  }
  if (j.contains("posterior_mean")) {
    require_fields(j["posterior_mean"], "posterior_mean", {"f", "kappa_bar"});
    auto f = parse_rational_array(j["posterior_mean"]["f"], "f");
    if (f.size() != num_theta) {
      throw input_error("f must assign a value to every attribute");
    }
    return PosteriorMean{std::move(f),
                         parse_scalar(j["posterior_mean"]["kappa_bar"], "kappa_bar")};
  }
  throw input_error("unknown privacy variant '" + j.begin().key() + "'");
}

// ---------------------------------------------------------------------------
// Quantile signals, rearrangements, extensions, composites.
// ---------------------------------------------------------------------------

// Structural parse only: integral and nonnegativity checks belong to the
// verification commands, which must be able to name a tampered density as a
// failed check rather than a file error.
inline QuantileSignal parse_quantile(const json& j, const StateSpace& space) {
  require_fields(j, "branch", {"breakpoints", "density"});
  QuantileSignal q{space, parse_rational_array(j["breakpoints"], "breakpoints"), {}};
  if (!j["density"].is_array() || j["density"].size() != space.num_omega()) {
    throw input_error("branch density must have one row per state");
  }
  for (const auto& row : j["density"]) {
    q.density.push_back(parse_rational_array(row, "density"));
    if (q.density.back().size() + 1 != q.breakpoints.size()) {
      throw input_error("branch density row length mismatch");
    }
  }
  return q;
}

inline json serialize_quantile(const QuantileSignal& q) {
  json density = json::array();
  for (const auto& row : q.density) density.push_back(serialize_rational_array(row));
  return {{"breakpoints", serialize_rational_array(q.breakpoints)},
          {"density", std::move(density)}};
}

inline ReorderAssignment parse_reorder_assignment(const json& j) {
  require_fields(j, "rearrangement", {"breakpoints", "cells"});
  ReorderAssignment out{parse_rational_array(j["breakpoints"], "breakpoints"), {}};
  if (!j["cells"].is_array()) throw input_error("rearrangement cells must be an array");
  for (const auto& cells : j["cells"]) {
    if (!cells.is_array()) throw input_error("rearrangement cells must be arrays");
    std::vector<std::size_t> indices;
    for (const auto& k : cells) {
      if (!k.is_number_unsigned()) {
        throw input_error("cell indices must be nonnegative integers");
      }
      indices.push_back(k.get<std::size_t>());
    }
    out.cells.push_back(std::move(indices));
  }
  return out;
}

// Conditional tables of the extension, recomputed from the atoms so the
// serialized object stays self-consistent.
inline std::vector<std::vector<Rational>> conditional_tables(
    const std::vector<Posterior>& atoms, const StateSpace& space) {
  const Posterior prior_theta = marginal_theta(space.prior(), space);
  std::vector<std::vector<Rational>> cond;
  for (const auto& mu : atoms) {
    const Posterior mu_theta = marginal_theta(mu, space);
    std::vector<Rational> row(space.num_omega());
    for (std::size_t i = 0; i < space.num_omega(); ++i) {
      const std::size_t t = space.theta_of(i);
      row[i] = mu_theta[t] > 0 ? mu[i] / mu_theta[t]
                               : space.prior()[i] / prior_theta[t];
    }
    cond.push_back(std::move(row));
  }
  return cond;
}

inline json serialize_extension(const MinExtension& ext) {
  json atoms = json::array(), cond = json::array();
  for (const auto& mu : ext.extended_atoms) atoms.push_back(serialize_posterior(mu));
  for (const auto& row : ext.cond) cond.push_back(serialize_rational_array(row));
  // Prior-recovery residuals, one per state; zero by construction.
  json residuals = json::array();
  for (std::size_t i = 0; i < ext.space.num_omega(); ++i) {
    Rational r = -ext.space.prior()[i];
    for (std::size_t n = 0; n < ext.gamma.size(); ++n) {
      r += ext.gamma.prob(n) * ext.extended_atoms[n][i];
    }
    residuals.push_back(format_rational(r));
  }
  return {{"gamma", serialize_belief(ext.gamma)},
          {"atoms", std::move(atoms)},
          {"cond", std::move(cond)},
          {"prior_residuals", std::move(residuals)}};
}

inline json serialize_composite(const CompositeSignal& c) {
  json atoms = json::array(), branches = json::array();
  for (const auto& mu : c.extension.extended_atoms) atoms.push_back(serialize_posterior(mu));
  for (const auto& q : c.branch_signals) branches.push_back(serialize_quantile(q));
  return {{"gamma", serialize_belief(c.extension.gamma)},
          {"atoms", std::move(atoms)},
          {"branches", std::move(branches)}};
}

inline CompositeSignal parse_composite(const json& j, const StateSpace& space) {
  require_fields(j, "composite", {"gamma", "atoms", "branches"});
  auto gamma = parse_belief(j["gamma"], "composite.gamma");
  if (gamma.dim() != space.num_theta()) {
    throw input_error("composite.gamma must live on the attribute simplex");
  }
  if (!j["atoms"].is_array() || j["atoms"].size() != gamma.size()) {
    throw input_error("composite needs one extended atom per gamma atom");
  }
  std::vector<Posterior> atoms;
  for (const auto& a : j["atoms"]) {
    atoms.push_back(parse_posterior(a, "composite atom"));
    if (atoms.back().dim() != space.num_omega()) {
      throw input_error("extended atoms must live on the full state simplex");
    }
  }
  if (!j["branches"].is_array() || j["branches"].size() != gamma.size()) {
    throw input_error("composite needs one branch per gamma atom");
  }
  MinExtension ext{std::move(gamma), space, conditional_tables(atoms, space), atoms};
  CompositeSignal c{std::move(ext), {}};
  for (const auto& b : j["branches"]) c.branch_signals.push_back(parse_quantile(b, space));
  return c;
}

// ---------------------------------------------------------------------------
// Problem files.
// ---------------------------------------------------------------------------

struct ProblemFile {
  int version = 1;
  StateSpace space;
  PrivacySpec privacy;
  std::optional<BeliefDistribution> gamma;    // attribute-simplex target
  std::optional<BeliefDistribution> gamma_b;  // second comparand for dominance
  std::optional<BeliefDistribution> tau;      // full-state distribution
  std::optional<CompositeSignal> composite;
};

inline ProblemFile parse_problem_file(const json& j) {
  require_fields(j, "problem file", {"version", "space", "privacy"},
                 {"gamma", "gamma_b", "tau", "composite"});
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) {
    throw input_error("unsupported problem file version (expected 1)");
  }
  StateSpace space = parse_space(j["space"]);
  PrivacySpec privacy = parse_privacy(j["privacy"], space.num_theta());
  const Posterior prior_theta = marginal_theta(space.prior(), space);
  validate_privacy_spec(privacy, prior_theta);

  ProblemFile pf{1, std::move(space), std::move(privacy), {}, {}, {}, {}};
  auto attribute_belief = [&](const char* field) {
    auto b = parse_belief(j[field], field);
    if (b.dim() != pf.space.num_theta()) {
      throw input_error(std::string(field) + " must live on the attribute simplex");
    }
    return b;
  };
  if (j.contains("gamma")) pf.gamma = attribute_belief("gamma");
  if (j.contains("gamma_b")) pf.gamma_b = attribute_belief("gamma_b");
  if (j.contains("tau")) {
    pf.tau = parse_belief(j["tau"], "tau");
    if (pf.tau->dim() != pf.space.num_omega()) {
      throw input_error("tau must live on the full state simplex");
    }
  }
  if (j.contains("composite")) pf.composite = parse_composite(j["composite"], pf.space);
  return pf;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot read file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error("invalid JSON in '" + path + "': " + e.what());
  }
}

inline ProblemFile load_problem_file(const std::string& path) {
  return parse_problem_file(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Decimal mirroring: a copy of a JSON tree in which every rational string is
// rendered with the requested number of decimals.  The exact payload always
// stays authoritative; the mirror is additive.
// ---------------------------------------------------------------------------

inline json decimal_mirror(const json& j, unsigned decimals) {
  if (j.is_string()) {
    try {
      return format_decimal(parse_rational(j.get<std::string>()), decimals);
    } catch (const input_error&) {
      return j;  // not a rational string; copied verbatim
    }
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& item : j) out.push_back(decimal_mirror(item, decimals));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (const auto& item : j.items()) out[item.key()] = decimal_mirror(item.value(), decimals);
    return out;
  }
  return j;
}

}  // namespace pcs::io
