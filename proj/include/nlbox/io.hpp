#pragma once

// JSON and CSV documents for boxes, structures, plans, certificates and traces.
// Requires the vendored nlohmann json.hpp on the include path.

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlbox/anf.hpp"
#include "nlbox/bits.hpp"
#include "nlbox/box.hpp"
#include "nlbox/comm.hpp"
#include "nlbox/distill.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/localdist.hpp"
#include "nlbox/rational.hpp"

namespace nlbox {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void spec_error(const std::string& path, const std::string& message) {
  throw ParseError(path + ": " + message);
}

inline const Json& require_field(const Json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) spec_error(path, std::string("missing field \"") + key + "\"");
  return *it;
}

inline void require_only_fields(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) spec_error(path, "unknown field \"" + key + "\"");
  }
}

inline Rational rational_field(const Json& j, const std::string& path) {
  if (!j.is_string()) spec_error(path, "expected a \"p/q\" string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    spec_error(path, e.what());
  }
}

inline Bits bitstring_key(const std::string& key, int n, const std::string& path) {
  try {
    return parse_bitstring(key, n);
  } catch (const Error& e) {
    spec_error(path, e.what());
  }
}

inline Anf anf_field(const Json& j, int n, const std::string& path) {
  if (!j.is_array()) spec_error(path, "expected a list of 1-based index lists");
  std::vector<std::vector<int>> lists;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string here = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array()) spec_error(here, "expected a list of variable indices");
    std::vector<int> list;
    for (std::size_t t = 0; t < j[k].size(); ++t) {
      if (!j[k][t].is_number_integer()) spec_error(here + "[" + std::to_string(t) + "]", "expected an integer");
      list.push_back(j[k][t].get<int>());
    }
    lists.push_back(std::move(list));
  }
  try {
    return Anf::from_index_lists(n, lists);
  } catch (const Error& e) {
    spec_error(path, e.what());
  }
}

inline ConditionalBox table_from_probs(const Json& probs, int n, const std::string& path) {
  if (!probs.is_object()) spec_error(path, "expected an object keyed by input bitstrings");
  const std::size_t side = std::size_t{1} << n;
  std::vector<Rational> table(side * side);
  std::vector<bool> seen(side, false);
  for (const auto& [in_key, row] : probs.items()) {
    const std::string row_path = path + "." + in_key;
    const Bits x = bitstring_key(in_key, n, row_path);
    seen[x] = true;
    if (!row.is_object()) spec_error(row_path, "expected an object keyed by output bitstrings");
    for (const auto& [out_key, value] : row.items()) {
      const std::string entry_path = row_path + "." + out_key;
      const Bits a = bitstring_key(out_key, n, entry_path);
      table[x * side + a] = rational_field(value, entry_path);
    }
  }
  for (Bits x = 0; x < side; ++x) {
    if (!seen[x]) spec_error(path, "missing input row " + to_bitstring(x, n));
  }
  try {
    return ConditionalBox::from_table(n, std::move(table));
  } catch (const Error& e) {
    spec_error(path, e.what());
  }
}

}  // namespace detail

/// Parses one box specification. `path` prefixes diagnostics, e.g. "$.components[0].epsilon".
inline ConditionalBox parse_box_spec(const Json& j, const std::string& path = "$") {
  if (!j.is_object()) detail::spec_error(path, "expected an object");
  const Json& n_field = detail::require_field(j, "n", path);
  if (!n_field.is_number_integer()) detail::spec_error(path + ".n", "expected an integer");
  const int n = n_field.get<int>();
  if (n < 1 || n > kMaxParties) {
    detail::spec_error(path + ".n", "party count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxParties));
  }
  const Json& kind_field = detail::require_field(j, "kind", path);
  if (!kind_field.is_string()) detail::spec_error(path + ".kind", "expected a string");
  const std::string kind = kind_field.get<std::string>();

  if (kind == "full_correlation") {
    detail::require_only_fields(j, {"n", "kind", "anf"}, path);
    return make_full_correlation(detail::anf_field(detail::require_field(j, "anf", path), n, path + ".anf"));
  }
  if (kind == "npr") {
    detail::require_only_fields(j, {"n", "kind"}, path);
    return make_npr(n);
  }
  if (kind == "even_parity") {
    detail::require_only_fields(j, {"n", "kind"}, path);
    return make_even_parity(n);
  }
  if (kind == "mixture") {
    detail::require_only_fields(j, {"n", "kind", "epsilon", "components"}, path);
    const Rational eps = detail::rational_field(detail::require_field(j, "epsilon", path), path + ".epsilon");
    if (sgn(eps) < 0 || eps > 1) detail::spec_error(path + ".epsilon", "weight " + to_string(eps) + " outside [0,1]");
    const Json& parts = detail::require_field(j, "components", path);
    if (!parts.is_array() || parts.size() != 2) detail::spec_error(path + ".components", "expected exactly two specs");
    ConditionalBox first = parse_box_spec(parts[0], path + ".components[0]");
    ConditionalBox second = parse_box_spec(parts[1], path + ".components[1]");
    for (int k = 0; k < 2; ++k) {
      if ((k == 0 ? first : second).parties() != n) {
        detail::spec_error(path + ".components[" + std::to_string(k) + "]", "party count differs from n");
      }
    }
    return mix(first, second, eps);
  }
  if (kind == "table") {
    detail::require_only_fields(j, {"n", "kind", "probs"}, path);
    return detail::table_from_probs(detail::require_field(j, "probs", path), n, path + ".probs");
  }
  detail::spec_error(path + ".kind", "unknown kind \"" + kind + "\"");
}

/// Parses JSON text; syntax errors carry nlohmann's line/column position.
inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline ConditionalBox parse_box_spec_text(const std::string& text) { return parse_box_spec(parse_json_text(text)); }

inline ConditionalBox load_box_spec(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_box_spec_text(buffer.str());
}

/// Table-kind spec listing every input row and the nonzero entries of each.
inline Json box_to_json(const ConditionalBox& b) {
  const int n = b.parties();
  Json probs = Json::object();
  for (Bits x = 0; x < b.side(); ++x) {
    Json row = Json::object();
    for (Bits a = 0; a < b.side(); ++a) {
      if (sgn(b.prob(a, x)) != 0) row[to_bitstring(a, n)] = to_string(b.prob(a, x));
    }
    probs[to_bitstring(x, n)] = std::move(row);
  }
  return Json{{"n", n}, {"kind", "table"}, {"probs", std::move(probs)}};
}

inline Json monomials_to_json(const std::vector<Monomial>& ms) {
  Json out = Json::array();
  for (Monomial m : ms) out.push_back(indices_of(m));
  return out;
}

inline Json anf_to_json(const Anf& f) { return Json(f.index_lists()); }

inline Json structure_to_json(const MonomialStructure& s) {
  Json components = Json::array();
  for (const auto& c : s.components) components.push_back(monomials_to_json(c));
  return Json{{"J", monomials_to_json(s.nonlocal)},
              {"components", std::move(components)},
              {"n_J", s.component_count()},
              {"m", s.exclusive_counts},
              {"support", indices_of(s.support)}};
}

inline Json plan_to_json(const CommunicationPlan& plan) {
  Json channels = Json::array();
  for (const Channel& c : plan.channels) channels.push_back({c.sender, c.receiver});
  Json constants = Json::object();
  for (const auto& [party, value] : plan.constants) constants[std::to_string(party)] = value ? 1 : 0;
  return Json{{"channels", std::move(channels)},
              {"isolated", indices_of(plan.isolated)},
              {"receiver", plan.receiver},
              {"constants", std::move(constants)}};
}

inline Json certificate_to_json(const DistanceCertificate& c) {
  Json weights = Json::array();
  for (const auto& [v, w] : c.primal_weights) weights.push_back({v, to_string(w)});
  Json prices = Json::array();
  for (const Rational& y : c.dual_entry_prices) prices.push_back(to_string(y));
  return Json{{"distance", to_string(c.distance)},
              {"weights", std::move(weights)},
              {"dual", {{"prices", std::move(prices)}, {"offset", to_string(c.dual_offset)}}},
              {"closest_box", box_to_json(c.closest_box)},
              {"simplex_iterations", c.simplex_iterations}};
}

inline std::string decimal_string(const Rational& r, int digits = 17) {
  std::ostringstream out;
  out << std::setprecision(digits) << mpf_class(r, 256);
  return out.str();
}

/// Columns round, epsilon, decimal, copies, exact. Rows past the exact budget show the
/// lower end of the certified enclosure with exact = 0.
inline std::string trace_to_csv(const DistillationTrace& t) {
  std::ostringstream out;
  out << "round,epsilon,decimal,copies,exact\n";
  mpz_class copies = 1;
  for (std::size_t k = 0; k < t.epsilons.size(); ++k) {
    const EpsilonEnclosure& e = t.epsilons[k];
    out << k << ',' << to_string(e.lower) << ',' << decimal_string(e.lower) << ',' << copies.get_str() << ','
        << (e.exact() ? 1 : 0) << '\n';
    copies *= 2;
  }
  return out.str();
}

inline Json trace_to_json(const DistillationTrace& t) {
  Json rows = Json::array();
  mpz_class copies = 1;
  for (std::size_t k = 0; k < t.epsilons.size(); ++k) {
    const EpsilonEnclosure& e = t.epsilons[k];
    Json row{{"round", k}, {"exact", e.exact()}};
    if (e.exact()) {
      row["epsilon"] = to_string(e.lower);
    } else {
      row["lower"] = to_string(e.lower);
      row["upper"] = to_string(e.upper);
    }
    row["decimal"] = decimal_string(e.lower);
    row["copies"] = copies.get_str();
    rows.push_back(std::move(row));
    copies *= 2;
  }
  return Json{{"n", t.parties}, {"rounds", t.rounds()}, {"audited_rounds", t.audited_rounds}, {"trace", std::move(rows)}};
}

}  // namespace nlbox
