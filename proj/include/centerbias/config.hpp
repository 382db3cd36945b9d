#pragma once

// Experiment configuration: one JSON document describing the L-function,
// the sampling grid and the output. Nothing else (environment, locale)
// influences the numbers.
//
//   {
//     "lfunction": {"family": "dirichlet", "character": "chi4"},
//     "xmax": 1000000,
//     "grid": "dyadic"            // or {"log_spaced": 40}
//   }
//
// Family blocks:
//   dirichlet  {"modulus": q, "values": {"a": v, ...}} or {"character": "chi4"|"trivial"};
//              v is a number or [re, im]
//   delta      {"cutoff": n}   (τ table size, default 10^6)
//   elliptic   {"model": [a1, a2, a3, a4, a6], "conductor": N, "rank": r,
//               "root_number": ±1, "bad_ap": {"p": a_p}, "cap": n}
//   custom     {"degree": d, "self_dual": bool, "cutoff": n,
//               "local_factors": {"p": [[re, im], ...]}}
// m, R, nu, mu and conductor may sit at the top level; missing ones fall
// back to the family defaults.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "centerbias/coeffs.hpp"
#include "centerbias/error.hpp"
#include "centerbias/primes.hpp"
#include "centerbias/series.hpp"
#include "centerbias/tau.hpp"

namespace centerbias {

using ojson = nlohmann::ordered_json;

enum class Family { dirichlet, delta, elliptic, custom };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::dirichlet: return "dirichlet";
    case Family::delta: return "delta";
    case Family::elliptic: return "elliptic";
    case Family::custom: return "custom";
  }
  return "unknown";
}

struct RaceParams {
  std::uint64_t q = 4;
  std::uint64_t a = 3;
  std::uint64_t b = 1;
  double s = 0.5;
};

struct ExperimentConfig {
  ojson raw;
  std::string name;
  Family family = Family::dirichlet;

  // dirichlet
  std::uint64_t modulus = 1;
  std::map<std::uint64_t, cplx> character;
  // delta
  std::uint64_t tau_cutoff = kTauDefaultCutoff;
  // elliptic
  WeierstrassModel model{};
  std::map<std::uint64_t, int> bad_ap;
  std::uint64_t cap = 100'000;
  int root_number = 1;
  // custom
  std::size_t degree = 1;
  bool self_dual = false;
  std::uint64_t custom_cutoff = 0;
  std::map<std::uint64_t, LocalFactor> factors;

  int m = 0;
  int R = 0;
  int nu = 0;
  std::vector<double> mu;
  std::optional<std::uint64_t> conductor;

  std::uint64_t xmax = 0;
  std::size_t log_points = 0;  // 0 = dyadic grid
  std::optional<std::string> zeros_path;
  std::optional<double> x;
  RaceParams race;
  std::optional<std::string> output_path;
  std::optional<std::string> output_format;

  // Largest admissible xmax for the family.
  std::uint64_t family_cap() const {
    switch (family) {
      case Family::dirichlet: return kSieveCeiling;
      case Family::delta: return tau_cutoff;
      case Family::elliptic: return cap;
      case Family::custom: return custom_cutoff;
    }
    return 0;
  }

  std::vector<double> grid() const {
    const auto top = static_cast<double>(xmax);
    if (log_points == 0) return dyadic_grid(top);
    return log_spaced_grid(std::min(16.0, top), top, log_points);
  }
};

namespace detail {

inline std::uint64_t parse_key(const std::string& key, const char* what) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(key.data(), key.data() + key.size(), v);
  if (r.ec != std::errc{} || r.ptr != key.data() + key.size()) {
    throw ValidationError(std::string(what) + " key '" + key + "' is not an integer");
  }
  return v;
}

inline cplx parse_complex(const ojson& v, const char* what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ValidationError(std::string(what) + " must be a number or [re, im]");
}

template <typename T>
T get_or(const ojson& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline void parse_dirichlet(const ojson& lf, ExperimentConfig& c) {
  if (lf.contains("character")) {
    const auto name = lf.at("character").get<std::string>();
    DirichletCharacter chi = DirichletCharacter::trivial();
    if (name == "chi4") chi = DirichletCharacter::chi4();
    else if (name != "trivial") throw ValidationError("unknown builtin character '" + name + "'");
    c.modulus = chi.modulus();
    for (std::uint64_t a = 0; a < c.modulus; ++a) {
      if (std::gcd(a, c.modulus) == 1) c.character[a] = chi(a);
    }
    if (c.name.empty()) c.name = name;
    return;
  }
  if (!lf.contains("modulus") || !lf.contains("values")) {
    throw ValidationError("dirichlet family needs 'character' or 'modulus' + 'values'");
  }
  c.modulus = get_or<std::uint64_t>(lf, "modulus", 0);
  const auto& values = lf.at("values");
  if (!values.is_object()) throw ValidationError("'values' must map residues to values");
  for (const auto& [k, v] : values.items()) {
    c.character[parse_key(k, "character")] = parse_complex(v, "character value");
  }
}

inline void parse_elliptic(const ojson& lf, ExperimentConfig& c) {
  const auto a = get_or<std::vector<std::int64_t>>(lf, "model", {});
  if (a.size() != 5) throw ValidationError("elliptic 'model' must list [a1, a2, a3, a4, a6]");
  c.model = {a[0], a[1], a[2], a[3], a[4]};
  if (!lf.contains("conductor")) throw ValidationError("elliptic family needs 'conductor'");
  c.conductor = get_or<std::uint64_t>(lf, "conductor", 0);
  c.cap = get_or<std::uint64_t>(lf, "cap", c.cap);
  if (lf.contains("bad_ap")) {
    for (const auto& [k, v] : lf.at("bad_ap").items()) {
      c.bad_ap[parse_key(k, "bad_ap")] = v.get<int>();
    }
  }
  const int rank = get_or<int>(lf, "rank", 0);
  if (rank < 0) throw ValidationError("elliptic rank must be >= 0");
  c.m = rank;
  c.root_number = get_or<int>(lf, "root_number", rank % 2 == 0 ? 1 : -1);
  c.R = 1;
}

inline void parse_custom(const ojson& lf, ExperimentConfig& c) {
  c.degree = get_or<std::size_t>(lf, "degree", 0);
  if (c.degree < 1 || c.degree > kMaxDegree) throw ValidationError("custom degree out of range");
  c.self_dual = get_or<bool>(lf, "self_dual", false);
  c.custom_cutoff = get_or<std::uint64_t>(lf, "cutoff", 0);
  if (!lf.contains("local_factors")) throw ValidationError("custom family needs 'local_factors'");
  for (const auto& [k, v] : lf.at("local_factors").items()) {
    const std::uint64_t p = parse_key(k, "local_factors");
    if (!v.is_array() || v.size() != c.degree) {
      throw ValidationError("local factor at p=" + k + " must list 'degree' Satake parameters");
    }
    std::vector<cplx> alphas;
    for (const auto& e : v) alphas.push_back(parse_complex(e, "Satake parameter"));
    c.factors.emplace(p, LocalFactor(p, alphas));
  }
  for (const std::uint64_t p : sieve_primes(c.custom_cutoff)) {
    if (!c.factors.count(p)) {
      throw ValidationError("custom family lacks a local factor at p=" + std::to_string(p));
    }
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const ojson& doc) {
  using detail::get_or;
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  if (!doc.contains("lfunction")) throw ValidationError("config needs an 'lfunction' block");
  const ojson& lf = doc.at("lfunction");
  ExperimentConfig c;
  c.raw = doc;
  c.name = get_or<std::string>(lf, "name", "");
  const auto family = get_or<std::string>(lf, "family", "");
  if (family == "dirichlet") {
    c.family = Family::dirichlet;
    detail::parse_dirichlet(lf, c);
    const DirichletCharacter chi(c.modulus, c.character);  // validates the table
    c.R = chi.is_real() ? -1 : 0;
    c.mu = {chi.is_odd() ? 1.0 : 0.0};
    c.conductor = c.modulus;
  } else if (family == "delta") {
    c.family = Family::delta;
    c.tau_cutoff = get_or<std::uint64_t>(lf, "cutoff", kTauDefaultCutoff);
    if (c.tau_cutoff < 2 || c.tau_cutoff > kTauMaxCutoff) {
      throw ValidationError("delta cutoff must lie in [2, " + std::to_string(kTauMaxCutoff) + "]");
    }
    c.R = 1;
    c.conductor = 1;
  } else if (family == "elliptic") {
    c.family = Family::elliptic;
    detail::parse_elliptic(lf, c);
  } else if (family == "custom") {
    c.family = Family::custom;
    detail::parse_custom(lf, c);
    if (!doc.contains("R")) throw ValidationError("custom family needs an explicit 'R'");
  } else {
    throw ValidationError("unknown lfunction family '" + family + "'");
  }
  if (c.name.empty()) c.name = family;

  c.m = get_or<int>(doc, "m", c.m);
  c.R = get_or<int>(doc, "R", c.R);
  c.nu = get_or<int>(doc, "nu", -c.R);
  if (c.nu != -c.R) {
    throw ValidationError("nu must equal -R (got nu=" + std::to_string(c.nu) +
                          ", R=" + std::to_string(c.R) + ")");
  }
  if (c.m < 0) throw ValidationError("m must be >= 0");
  if (c.family == Family::elliptic && doc.contains("m") && c.m != get_or<int>(lf, "rank", c.m)) {
    throw ValidationError("m disagrees with the elliptic rank");
  }
  c.mu = get_or<std::vector<double>>(doc, "mu", c.mu);
  if (doc.contains("conductor")) c.conductor = get_or<std::uint64_t>(doc, "conductor", 1);

  if (!doc.contains("xmax")) throw ValidationError("config needs 'xmax'");
  c.xmax = get_or<std::uint64_t>(doc, "xmax", 0);
  if (c.xmax < 1) throw ValidationError("xmax must be >= 1");
  if (c.xmax > c.family_cap()) {
    throw ValidationError("xmax " + std::to_string(c.xmax) + " exceeds the " + family +
                          " cap " + std::to_string(c.family_cap()));
  }
  if (doc.contains("grid")) {
    const ojson& g = doc.at("grid");
    if (g.is_string() && g.get<std::string>() == "dyadic") {
      c.log_points = 0;
    } else if (g.is_object() && g.contains("log_spaced")) {
      c.log_points = get_or<std::size_t>(g, "log_spaced", 0);
      if (c.log_points < 1) throw ValidationError("log_spaced grid needs n >= 1");
    } else {
      throw ValidationError("grid must be \"dyadic\" or {\"log_spaced\": n}");
    }
  }
  if (doc.contains("zeros_path")) c.zeros_path = get_or<std::string>(doc, "zeros_path", "");
  if (doc.contains("x")) c.x = get_or<double>(doc, "x", 0.0);
  if (doc.contains("race")) {
    const ojson& r = doc.at("race");
    c.race.q = get_or<std::uint64_t>(r, "q", c.race.q);
    c.race.a = get_or<std::uint64_t>(r, "a", c.race.a);
    c.race.b = get_or<std::uint64_t>(r, "b", c.race.b);
    c.race.s = get_or<double>(r, "s", c.race.s);
  }
  if (doc.contains("output")) {
    const ojson& o = doc.at("output");
    if (o.contains("path")) c.output_path = get_or<std::string>(o, "path", "");
    if (o.contains("format")) {
      c.output_format = get_or<std::string>(o, "format", "");
      if (*c.output_format != "csv" && *c.output_format != "json") {
        throw ValidationError("output format must be csv or json");
      }
    }
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Builds the spec. Δ tables come from (or go to) `tau_cache`.
inline LFunctionSpec build_spec(const ExperimentConfig& c,
                                const std::filesystem::path& tau_cache = "tau_cache.bin",
                                unsigned threads = 1) {
  std::optional<CoefficientSource> source;
  switch (c.family) {
    case Family::dirichlet:
      source.emplace(DirichletSource{DirichletCharacter(c.modulus, c.character)});
      break;
    case Family::delta:
      source.emplace(delta_source(load_or_build_tau(tau_cache, c.tau_cutoff, std::max(threads, 1u))));
      break;
    case Family::elliptic:
      source.emplace(elliptic_source(c.model, c.conductor.value_or(1), c.bad_ap, c.cap));
      break;
    case Family::custom:
      source.emplace(CustomSource{c.degree, c.custom_cutoff, c.factors, c.self_dual});
      break;
  }
  LFunctionSpec spec{c.name, *source, c.m, c.R, c.nu, c.mu, c.conductor, {}};
  spec.validate();
  return spec;
}

}  // namespace centerbias
