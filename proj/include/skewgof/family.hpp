#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "skewgof/alpha_stable.hpp"
#include "skewgof/errors.hpp"
#include "skewgof/sinh_arcsinh.hpp"
#include "skewgof/skew_laplace.hpp"
#include "skewgof/skew_normal.hpp"
#include "skewgof/skew_t.hpp"
#include "skewgof/tukey_gh.hpp"

namespace skewgof {

enum class Family { sn, st, sl, gh, as, sas };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::sn: return "sn";
    case Family::st: return "st";
    case Family::sl: return "sl";
    case Family::gh: return "gh";
    case Family::as: return "as";
    case Family::sas: return "sas";
  }
  return "?";
}

inline Family family_from_name(const std::string& s) {
  if (s == "sn") return Family::sn;
  if (s == "st") return Family::st;
  if (s == "sl") return Family::sl;
  if (s == "gh") return Family::gh;
  if (s == "as") return Family::as;
  if (s == "sas") return Family::sas;
  throw data_error("unknown family '" + s + "' (expected sn|st|sl|gh|as|sas)");
}

using FamilySpec = std::variant<SnParams, StParams, SlParams, GhParams, AsParams, SasParams>;

inline Family family_of(const FamilySpec& spec) {
  return static_cast<Family>(spec.index());
}

inline std::size_t spec_dim(const FamilySpec& spec) {
  return std::visit([](const auto& par) { return par.p(); }, spec);
}

inline void validate_spec(const FamilySpec& spec) {
  std::visit([](const auto& par) { par.validate(); }, spec);
}

inline Sample sample_from(const SnParams& p, std::size_t n, RandomStream& s) { return sample_sn(p, n, s); }
inline Sample sample_from(const StParams& p, std::size_t n, RandomStream& s) { return sample_st(p, n, s); }
inline Sample sample_from(const SlParams& p, std::size_t n, RandomStream& s) { return sample_sl(p, n, s); }
inline Sample sample_from(const GhParams& p, std::size_t n, RandomStream& s) { return sample_gh(p, n, s); }
inline Sample sample_from(const AsParams& p, std::size_t n, RandomStream& s) { return sample_as(p, n, s); }
inline Sample sample_from(const SasParams& p, std::size_t n, RandomStream& s) { return sample_sas(p, n, s); }

inline Sample sample_any(const FamilySpec& spec, std::size_t n, RandomStream& stream) {
  return std::visit([&](const auto& par) { return sample_from(par, n, stream); }, spec);
}

// ---- JSON round trip ------------------------------------------------------
// {"family":"sn","xi":[...],"omega":[[...],...],"alpha":[...]}
// {"family":"st", ... ,"nu":5}
// {"family":"gh","xi":[...],"omega":[[...]],"g":[...],"h":[...]}
// {"family":"as","xi":[...],"alpha":1.5,"atoms":[{"s":[...],"weight":w},...]}
// {"family":"sas","e":[...],"f":[...]}

namespace detail {

inline nlohmann::json vec_json(const Vec& v) { return nlohmann::json(v); }

inline nlohmann::json mat_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Vec vec_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array())
    throw data_error("family spec: missing or malformed array '" + key + "'");
  Vec v;
  for (const auto& e : j[key]) {
    if (!e.is_number()) throw data_error("family spec: '" + key + "' must hold numbers");
    v.push_back(e.get<double>());
  }
  if (v.empty()) throw data_error("family spec: '" + key + "' is empty");
  return v;
}

inline Matrix mat_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty())
    throw data_error("family spec: missing or malformed matrix '" + key + "'");
  const auto& rows = j[key];
  std::size_t n = rows.size();
  Matrix m;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n)
      throw data_error("family spec: matrix '" + key + "' must be square");
    if (i == 0) m = Matrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
      if (!rows[i][c].is_number())
        throw data_error("family spec: matrix '" + key + "' must hold numbers");
      m(i, c) = rows[i][c].get<double>();
    }
  }
  return m;
}

inline double num_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw data_error("family spec: missing or malformed number '" + key + "'");
  return j[key].get<double>();
}

}  // namespace detail

inline nlohmann::json spec_to_json(const FamilySpec& spec) {
  using nlohmann::json;
  json j;
  j["family"] = family_name(family_of(spec));
  std::visit(
      [&](const auto& par) {
        using T = std::decay_t<decltype(par)>;
        if constexpr (std::is_same_v<T, SnParams> || std::is_same_v<T, SlParams>) {
          j["xi"] = detail::vec_json(par.xi);
          j["omega"] = detail::mat_json(par.omega);
          j["alpha"] = detail::vec_json(par.alpha);
        } else if constexpr (std::is_same_v<T, StParams>) {
          j["xi"] = detail::vec_json(par.xi);
          j["omega"] = detail::mat_json(par.omega);
          j["alpha"] = detail::vec_json(par.alpha);
          j["nu"] = par.nu;
        } else if constexpr (std::is_same_v<T, GhParams>) {
          j["xi"] = detail::vec_json(par.xi);
          j["omega"] = detail::mat_json(par.omega);
          j["g"] = detail::vec_json(par.g);
          j["h"] = detail::vec_json(par.h);
        } else if constexpr (std::is_same_v<T, AsParams>) {
          j["xi"] = detail::vec_json(par.xi);
          j["alpha"] = par.alpha;
          nlohmann::json atoms = nlohmann::json::array();
          for (const auto& a : par.atoms)
            atoms.push_back({{"s", detail::vec_json(a.s)}, {"weight", a.gamma}});
          j["atoms"] = std::move(atoms);
        } else if constexpr (std::is_same_v<T, SasParams>) {
          j["e"] = detail::vec_json(par.e);
          j["f"] = detail::vec_json(par.f);
        }
      },
      spec);
  return j;
}

inline FamilySpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw data_error("family spec: expected an object with a 'family' string");
  Family fam = family_from_name(j["family"].get<std::string>());
  FamilySpec spec;
  switch (fam) {
    case Family::sn: {
      SnParams p{detail::vec_from_json(j, "xi"), detail::mat_from_json(j, "omega"),
                 detail::vec_from_json(j, "alpha")};
      spec = p;
      break;
    }
    case Family::st: {
      StParams p{detail::vec_from_json(j, "xi"), detail::mat_from_json(j, "omega"),
                 detail::vec_from_json(j, "alpha"), detail::num_from_json(j, "nu")};
      spec = p;
      break;
    }
    case Family::sl: {
      SlParams p{detail::vec_from_json(j, "xi"), detail::mat_from_json(j, "omega"),
                 detail::vec_from_json(j, "alpha")};
      spec = p;
      break;
    }
    case Family::gh: {
      GhParams p{detail::vec_from_json(j, "xi"), detail::mat_from_json(j, "omega"),
                 detail::vec_from_json(j, "g"), detail::vec_from_json(j, "h")};
      spec = p;
      break;
    }
    case Family::as: {
      AsParams p;
      p.xi = detail::vec_from_json(j, "xi");
      p.alpha = detail::num_from_json(j, "alpha");
      if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
        throw data_error("family spec: 'as' needs a non-empty 'atoms' array");
      for (const auto& aj : j["atoms"]) {
        AsAtom atom;
        atom.s = detail::vec_from_json(aj, "s");
        atom.gamma = detail::num_from_json(aj, "weight");
        p.atoms.push_back(std::move(atom));
      }
      spec = p;
      break;
    }
    case Family::sas: {
      SasParams p{detail::vec_from_json(j, "e"), detail::vec_from_json(j, "f")};
      spec = p;
      break;
    }
  }
  try {
    validate_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw data_error(std::string("family spec: ") + e.what());
  }
  return spec;
}

}  // namespace skewgof
