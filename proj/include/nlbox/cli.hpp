#pragma once

// Command-line front end. Exit codes: 0 success, 1 invariant or reproduction failure,
// 2 usage or parse error. Requires the vendored CLI11.hpp and json.hpp.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlbox/io.hpp"
#include "nlbox/nlbox.hpp"
#include "nlbox/reproduce.hpp"

namespace nlbox::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

namespace detail {

inline Json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str());
}

inline std::string mask_string(Bits mask) {
  std::string s = "{";
  for (int i : indices_of(mask)) s += (s.size() > 1 ? "," : "") + std::to_string(i);
  return s + "}";
}

inline int cmd_box(const std::string& file, bool check, std::ostream& out) {
  const ConditionalBox b = load_box_spec(file);
  const int n = b.parties();
  Json support = Json::object();
  for (Bits x = 0; x < b.side(); ++x) {
    std::size_t count = 0;
    for (const Rational& p : b.row(x)) count += sgn(p) != 0;
    support[to_bitstring(x, n)] = count;
  }
  const auto violation = find_signaling(b);
  Json report{{"n", n}, {"support_per_input", std::move(support)}, {"non_signaling", !violation.has_value()}};
  if (violation) {
    report["signaling"] = {{"subset", indices_of(violation->subset)},
                           {"input", to_bitstring(violation->input, n)},
                           {"other_input", to_bitstring(violation->other_input, n)}};
  }
  Json uniform = Json::object();
  for (int k = 1; k < n; ++k) uniform[std::to_string(k)] = subset_outputs_uniform(b, k);
  report["subset_outputs_uniform"] = std::move(uniform);
  out << report.dump(2) << '\n';
  if (check && violation) {
    out << "check failed: parties " << mask_string(violation->subset) << " see different marginals on inputs "
        << to_bitstring(violation->input, n) << " and " << to_bitstring(violation->other_input, n) << '\n';
    return kFailure;
  }
  return kOk;
}

inline int cmd_distill(int n, const std::string& epsilon, const std::optional<std::string>& delta,
                       const std::optional<std::size_t>& rounds, bool audit, const std::string& format,
                       std::ostream& out) {
  const Rational eps0 = parse_rational(epsilon);
  DistillOptions options;
  options.box_level_audit = audit;
  const DistillationTrace trace = rounds ? distill_rounds(n, eps0, *rounds, options)
                                         : distill_to(n, eps0, parse_rational(*delta), options);
  if (format == "json") {
    out << trace_to_json(trace).dump(2) << '\n';
  } else {
    out << trace_to_csv(trace);
  }
  return kOk;
}

inline std::optional<Anf> function_of_spec(const Json& j, const ConditionalBox& b) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "full_correlation") return nlbox::detail::anf_field(j.at("anf"), b.parties(), "$.anf");
  if (kind == "npr") return Anf::product(b.parties(), full_mask(b.parties()));
  if (kind == "even_parity") return Anf(b.parties());
  return std::nullopt;
}

inline int cmd_comm(const std::string& file, std::ostream& out) {
  const Json spec = load_json_file(file);
  const ConditionalBox b = parse_box_spec(spec);
  const auto f = function_of_spec(spec, b);
  if (!f) throw ParseError("$.kind: comm needs a full_correlation, npr or even_parity spec");
  const int n = f->variables();
  const MonomialStructure s = monomial_structure(*f);
  Json report{{"function", f->to_string()}, {"anf", anf_to_json(*f)}, {"structure", structure_to_json(s)}};
  try {
    report["N_scratch"] = channels_scratch(s);
    report["N_distill_bound"] = channels_distill_bound(s, n);
    report["corollary_holds"] = corollary_holds(s, n);
  } catch (const HypothesisError& e) {
    report["notice"] = e.what();
    out << report.dump(2) << '\n';
    return kOk;
  }
  try {
    report["plan"] = plan_to_json(make_isolation_plan(s, n));
  } catch (const HypothesisError& e) {
    report["plan"] = nullptr;
    report["notice"] = e.what();
  }
  out << report.dump(2) << '\n';
  return kOk;
}

inline int cmd_distance(const std::string& file, int max_parties, std::ostream& out) {
  const ConditionalBox b = load_box_spec(file);
  DistanceOptions options;
  options.max_parties = max_parties;
  if (b.parties() > max_parties) {
    throw DomainError("distance LP for " + std::to_string(b.parties()) + " parties exceeds the cap of " +
                      std::to_string(max_parties) + " (raise it with --max-parties)");
  }
  out << certificate_to_json(l1_distance_to_local(b, options)).dump(2) << '\n';
  return kOk;
}

inline int cmd_survey3(std::ostream& out) {
  const ThreePartySurvey survey = survey_three_party();
  Json classes = Json::array();
  for (std::size_t c = 0; c < survey.classes.size(); ++c) {
    const SurveyClass& cls = survey.classes[c];
    classes.push_back({{"representative", cls.representative.to_string()},
                       {"members", cls.members},
                       {"nonlocal_members", cls.nonlocal_members},
                       {"precondition_holds", cls.precondition_holds}});
  }
  Json never = Json::array();
  for (std::size_t c : survey.classes_never_satisfying) never.push_back(survey.classes[c].representative.to_string());
  Json exceeds = Json::array();
  for (const Anf& f : survey.plan_exceeds_bound) exceeds.push_back(f.to_string());

  auto entry_for = [&survey](const Anf& f) -> const SurveyEntry& {
    for (const auto& e : survey.entries) {
      if (e.function == f) return e;
    }
    throw Error("survey misses " + f.to_string());
  };
  auto entry_json = [](const SurveyEntry& e) {
    Json j{{"function", e.function.to_string()}, {"n_J", e.structure.component_count()}, {"m", e.structure.exclusive_counts}};
    j["N_scratch"] = e.channels_scratch ? Json(*e.channels_scratch) : Json(nullptr);
    j["N_distill_bound"] = e.channels_distill_bound ? Json(*e.channels_distill_bound) : Json(nullptr);
    j["corollary_holds"] = e.corollary_holds ? Json(*e.corollary_holds) : Json(nullptr);
    return j;
  };
  const Anf majority = Anf::from_index_lists(3, {{1, 2}, {1, 3}, {2, 3}});
  const Anf product = Anf::from_index_lists(3, {{1, 2, 3}});

  Json report{{"functions_with_nonlocal_part", survey.entries.size()},
              {"classes", std::move(classes)},
              {"classes_never_satisfying", std::move(never)},
              {"all_nonlocal_satisfy", survey.all_nonlocal_satisfy},
              {"plan_exceeds_bound", std::move(exceeds)},
              {"x1x2 ^ x1x3 ^ x2x3", entry_json(entry_for(majority))},
              {"x1x2x3", entry_json(entry_for(product))}};
  if (!survey.all_nonlocal_satisfy) {
    report["discrepancy"] =
        "not every three-party function with a non-local part meets the corollary precondition, so the "
        "claim that all purely three-partite correlations can be distilled with partial communication is "
        "not certified by these counts";
  }
  out << report.dump(2) << '\n';
  return kOk;
}

inline int cmd_reproduce(const std::string& epsilon, std::size_t rounds, std::ostream& out) {
  ExampleOptions options;
  options.epsilon = parse_rational(epsilon);
  options.rounds = rounds;
  const ExampleReport report = reproduce_example(options);
  out << "function: " << report.function.to_string() << '\n';
  for (const ExampleCheck& c : report.checks) {
    out << (c.pass ? "PASS" : "FAIL") << ' ' << c.name
        << ": expected " << c.expected << ", got " << c.actual << '\n';
    if (!c.note.empty()) out << "     note: " << c.note << '\n';
  }
  out << "trace (n = 3):\n" << trace_to_csv(report.trace);
  out << "closest local box found by the LP uses " << report.certificate.primal_weights.size()
      << " vertices; simplex iterations " << report.certificate.simplex_iterations << '\n';
  std::size_t failed = 0;
  for (const ExampleCheck& c : report.checks) failed += !c.pass;
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return failed == 0 ? kOk : kFailure;
}

inline int cmd_sample(const std::string& file, const std::string& input, std::size_t samples, std::uint64_t seed,
                      std::ostream& out) {
  const ConditionalBox b = load_box_spec(file);
  const int n = b.parties();
  const Bits x = parse_bitstring(input, n);
  if (samples == 0) throw DomainError("--samples must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> counts(b.side(), 0);
  for (std::size_t k = 0; k < samples; ++k) ++counts[sample(b, x, rng)];

  // Pass/fail uses one Pearson chi-square per input, standardized by its mean and
  // deviation; per-output deviations are reported in units of their own sigma.
  Json outputs = Json::object();
  double chi2 = 0.0;
  int support = 0;
  bool impossible_drawn = false;
  for (Bits a = 0; a < b.side(); ++a) {
    const double p = to_double(b.prob(a, x));
    if (p == 0.0) {
      impossible_drawn = impossible_drawn || counts[a] != 0;
      if (counts[a] == 0) continue;
    } else {
      ++support;
    }
    const double expected = p * static_cast<double>(samples);
    const double sigma = std::sqrt(expected * (1.0 - p));
    const double deviation = static_cast<double>(counts[a]) - expected;
    if (p > 0.0) chi2 += deviation * deviation / expected;
    outputs[to_bitstring(a, n)] = {{"probability", to_string(b.prob(a, x))},
                                   {"expected", expected},
                                   {"observed", counts[a]},
                                   {"deviation_in_sigma", sigma == 0.0 ? 0.0 : deviation / sigma}};
  }
  const double dof = support - 1;
  const double z = dof == 0 ? 0.0 : (chi2 - dof) / std::sqrt(2.0 * dof);
  const bool within = !impossible_drawn && z <= 3.0;
  Json report{{"input", input}, {"samples", samples}, {"seed", seed}, {"outputs", std::move(outputs)},
              {"chi_square", chi2}, {"degrees_of_freedom", dof}, {"chi_square_z", z},
              {"within_3_sigma", within}};
  out << report.dump(2) << '\n';
  return within ? kOk : kFailure;
}

}  // namespace detail

/// Runs one subcommand; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact analysis of multi-party non-local boxes", "nlbox"};
  app.require_subcommand(1);

  std::string spec;
  bool check = false;
  auto* box = app.add_subcommand("box", "summarize a box spec and check non-signaling");
  box->add_option("spec", spec, "box spec (JSON)")->required();
  box->add_flag("--check", check, "exit 1 when the box signals");

  int n = 0;
  std::string epsilon = "1/2";
  std::optional<std::string> delta;
  std::optional<std::size_t> rounds;
  bool audit = false;
  std::string format = "csv";
  auto* distill = app.add_subcommand("distill", "iterate the BS map on the PR/even-parity family");
  distill->add_option("--n", n, "parties (2..8)")->required();
  distill->add_option("--epsilon", epsilon, "starting weight p/q in (0,1)")->required();
  auto* delta_opt = distill->add_option("--delta", delta, "stop once 1 - epsilon < delta");
  auto* rounds_opt = distill->add_option("--rounds", rounds, "run exactly this many rounds");
  delta_opt->excludes(rounds_opt);
  distill->add_flag("--audit-boxlevel", audit, "also run every exact round on full box tables");
  distill->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* comm = app.add_subcommand("comm", "monomial structure, channel counts and isolation plan");
  comm->add_option("spec", spec, "full-correlation box spec (JSON)")->required();

  int max_parties = 5;
  auto* distance = app.add_subcommand("distance", "exact L1 distance to the local polytope");
  distance->add_option("spec", spec, "box spec (JSON)")->required();
  distance->add_option("--max-parties", max_parties, "override the party cap of the LP");

  app.add_subcommand("survey3", "channel counts for every three-party Boolean function");

  std::string example_epsilon = "1/2";
  std::size_t example_rounds = 10;
  auto* reproduce = app.add_subcommand("reproduce-example", "run the five-party worked example end to end");
  reproduce->add_option("--epsilon", example_epsilon, "noise weight of the starting box");
  reproduce->add_option("--rounds", example_rounds, "BS rounds on the isolated box");

  std::string input;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  auto* sampler = app.add_subcommand("sample", "Monte Carlo frequencies against exact probabilities");
  sampler->add_option("spec", spec, "box spec (JSON)")->required();
  sampler->add_option("--input", input, "input bitstring, party 1 leftmost")->required();
  sampler->add_option("--samples", samples, "number of draws");
  sampler->add_option("--seed", seed, "64-bit seed of the generator");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*box) return detail::cmd_box(spec, check, out);
    if (*distill) {
      if (!delta && !rounds) throw CLI::RequiredError("--delta or --rounds");
      return detail::cmd_distill(n, epsilon, delta, rounds, audit, format, out);
    }
    if (*comm) return detail::cmd_comm(spec, out);
    if (*distance) return detail::cmd_distance(spec, max_parties, out);
    if (app.got_subcommand("survey3")) return detail::cmd_survey3(out);
    if (*reproduce) return detail::cmd_reproduce(example_epsilon, example_rounds, out);
    if (*sampler) return detail::cmd_sample(spec, input, samples, seed, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "failure: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace nlbox::cli
