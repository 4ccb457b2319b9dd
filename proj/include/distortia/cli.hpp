#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "distortia/acceptability.hpp"
#include "distortia/choquet.hpp"
#include "distortia/csv.hpp"
#include "distortia/errors.hpp"
#include "distortia/logarithm.hpp"
#include "distortia/portfolio.hpp"
#include "distortia/properties.hpp"
#include "distortia/semigroup.hpp"
#include "distortia/spec_grammar.hpp"

// Command-line surface. Output is deterministic: fixed field order and
// %.15g number formatting; infinities are emitted as the string sentinels
// "inf" / "-inf". Exit codes: 0 ok, 2 validation error, 3 numeric error.

namespace distortia::cli {

inline std::string jnum(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(v)) return "\"nan\"";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

inline double accuracy_from_env() {
  const char* env = std::getenv("DISTORTIA_ACCURACY");
  if (!env) return default_accuracy();
  char* end = nullptr;
  double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v >= 1e-12) || !(v <= 1e-3))
    throw ValidationError("DISTORTIA_ACCURACY must be a number in [1e-12, 1e-3]");
  return v;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"distortia: concave distortion semigroups and acceptability indices"};
  app.require_subcommand(1);

  double accuracy = -1.0;  // resolved after parse (flag wins over env)
  app.add_option("--accuracy", accuracy, "Psi evaluation accuracy (default env DISTORTIA_ACCURACY or 1e-9)");

  // psi
  auto* psi_cmd = app.add_subcommand("psi", "evaluate Psi_t(x) for a semigroup spec");
  std::string psi_spec;
  std::vector<double> psi_t, psi_x;
  std::string psi_format = "tsv";
  psi_cmd->add_option("--semigroup", psi_spec, "generator spec")->required();
  psi_cmd->add_option("--t", psi_t, "flow times (repeatable)")->required()->expected(-1);
  psi_cmd->add_option("--x", psi_x, "evaluation points (repeatable)")->required()->expected(-1);
  psi_cmd->add_option("--format", psi_format, "json|tsv")->check(CLI::IsMember({"json", "tsv"}));

  // index
  auto* index_cmd = app.add_subcommand("index", "acceptability index of a sample file");
  std::string index_spec, index_samples;
  double index_tol = 1e-9, index_tmax = 50.0;
  index_cmd->add_option("--semigroup", index_spec, "generator spec")->required();
  index_cmd->add_option("--samples", index_samples, "sample CSV (pnl[,weight])")->required();
  index_cmd->add_option("--tol", index_tol, "bisection tolerance");
  index_cmd->add_option("--t-max", index_tmax, "search cap");

  // measures
  auto* meas_cmd = app.add_subcommand("measures", "SR / RAROC / GLR / CRAROC of a sample file");
  std::string meas_samples, meas_craroc = "clamp(2)", meas_format = "tsv";
  double meas_lambda = 0.05;
  meas_cmd->add_option("--samples", meas_samples, "sample CSV (pnl[,weight])")->required();
  meas_cmd->add_option("--lambda", meas_lambda, "V@R level for RAROC (default 0.05)");
  meas_cmd->add_option("--craroc-distortion", meas_craroc,
                       "distortion spec for CRAROC (default clamp(2))");
  meas_cmd->add_option("--format", meas_format, "json|tsv")->check(CLI::IsMember({"json", "tsv"}));

  // log
  auto* log_cmd = app.add_subcommand("log", "recover the generator of a time-1 distortion");
  std::string log_dist, log_knots_out;
  std::vector<double> log_grid;
  log_cmd->add_option("--distortion", log_dist,
                      "distortion spec (pow(p)|clamp(c)|wang1) or CSV path (x,psi)")
      ->required();
  log_cmd->add_option("--grid", log_grid, "recovery grid points (default: built-in grid)")
      ->expected(-1);
  log_cmd->add_option("--knots-out", log_knots_out, "write recovered generator knots CSV here");

  // props
  auto* props_cmd = app.add_subcommand("props", "property table for generator specs");
  std::vector<std::string> props_specs;
  std::string props_format = "tsv";
  props_cmd->add_option("--semigroup", props_specs, "generator specs (repeatable)")
      ->required()
      ->expected(-1);
  props_cmd->add_option("--format", props_format, "json|tsv")
      ->check(CLI::IsMember({"json", "tsv"}));

  // portfolio
  auto* port_cmd = app.add_subcommand("portfolio", "maximize the index over unit directions");
  std::string port_spec, port_scen;
  int port_starts = 16;
  std::uint64_t port_seed = 0;
  double port_tol = 1e-7;
  port_cmd->add_option("--semigroup", port_spec, "generator spec")->required();
  port_cmd->add_option("--scenarios", port_scen, "scenario CSV (p,asset1,...)")->required();
  port_cmd->add_option("--starts", port_starts, "multistart count (default 16)");
  port_cmd->add_option("--seed", port_seed, "seed for the start sequence (default 0)");
  port_cmd->add_option("--tol", port_tol, "index tolerance inside the optimizer");

  std::vector<const char*> argv;
  argv.push_back("distortia");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (accuracy < 0.0) accuracy = accuracy_from_env();

    if (psi_cmd->parsed()) {
      Generator g = parse_generator_spec(psi_spec);
      Semigroup sg = build_semigroup(g, accuracy);
      if (psi_format == "tsv") {
        out << "t\tx\tpsi\n";
        for (double t : psi_t)
          for (double x : psi_x)
            out << jnum(t) << '\t' << jnum(x) << '\t' << jnum(sg.psi(t, x)) << '\n';
      } else {
        out << "{\"semigroup\":" << jstr(g.spec()) << ",\"accuracy\":" << jnum(accuracy)
            << ",\"rows\":[";
        bool first = true;
        for (double t : psi_t)
          for (double x : psi_x) {
            if (!first) out << ',';
            first = false;
            out << "{\"t\":" << jnum(t) << ",\"x\":" << jnum(x)
                << ",\"psi\":" << jnum(sg.psi(t, x)) << '}';
          }
        out << "]}\n";
      }
      return 0;
    }

    if (index_cmd->parsed()) {
      Generator g = parse_generator_spec(index_spec);
      Semigroup sg = build_semigroup(g, accuracy);
      auto [values, weights] = read_samples_csv(index_samples);
      EmpiricalDistribution d = from_samples(values, weights);
      AlphaResult r = alpha(sg, d, index_tol, index_tmax);
      out << "{\"semigroup\":" << jstr(g.spec()) << ",\"samples\":" << jstr(index_samples)
          << ",\"tol\":" << jnum(index_tol) << ",\"t_max\":" << jnum(index_tmax)
          << ",\"value\":" << jnum(r.value) << ",\"status\":" << jstr(to_string(r.status))
          << ",\"bracket_lo\":" << jnum(r.bracket_lo) << ",\"bracket_hi\":" << jnum(r.bracket_hi)
          << ",\"evaluations\":" << r.evaluations << "}\n";
      return 0;
    }

    if (meas_cmd->parsed()) {
      auto [values, weights] = read_samples_csv(meas_samples);
      EmpiricalDistribution d = from_samples(values, weights);
      Distortion psi = parse_distortion_spec(meas_craroc);
      double sr = sharpe(d);
      double rr = raroc(d, meas_lambda);
      double gl = glr(d);
      double cr = craroc(d, psi);
      if (meas_format == "tsv") {
        out << "measure\tvalue\n";
        out << "sr\t" << jnum(sr) << "\nraroc\t" << jnum(rr) << "\nglr\t" << jnum(gl)
            << "\ncraroc\t" << jnum(cr) << '\n';
      } else {
        out << "{\"samples\":" << jstr(meas_samples) << ",\"lambda\":" << jnum(meas_lambda)
            << ",\"craroc_distortion\":" << jstr(psi.describe()) << ",\"sr\":" << jnum(sr)
            << ",\"raroc\":" << jnum(rr) << ",\"glr\":" << jnum(gl)
            << ",\"craroc\":" << jnum(cr) << "}\n";
      }
      return 0;
    }

    if (log_cmd->parsed()) {
      Distortion psi = parse_distortion_spec(log_dist);
      LogRecoveryOptions opts;
      opts.accuracy = accuracy;
      opts.grid = log_grid;
      ExistenceReport rep = existence_check(psi, opts);
      const LogRecovery& rec = rep.recovery;
      out << "{\"distortion\":" << jstr(psi.describe()) << ",\"trivial\":"
          << (rep.trivial ? "true" : "false")
          << ",\"psi_prime_at_1\":" << jnum(rec.psi_prime_at_1)
          << ",\"concavity_pass\":" << (rec.concavity.pass ? "true" : "false")
          << ",\"worst_violation\":" << jnum(rec.concavity.violation)
          << ",\"violation_x\":" << jnum(rec.concavity.x_mid)
          << ",\"jump_factor\":" << jnum(rec.jump_factor)
          << ",\"roundtrip_error\":" << jnum(rec.roundtrip_error)
          << ",\"verdict\":" << jstr(rep.plausible ? "plausible" : "rejected")
          << ",\"evidence\":" << jstr(rep.evidence) << ",\"grid\":[";
      for (size_t i = 0; i < rec.grid.size(); ++i)
        out << (i ? "," : "") << jnum(rec.grid[i]);
      out << "],\"g\":[";
      for (size_t i = 0; i < rec.g_estimates.size(); ++i)
        out << (i ? "," : "") << jnum(rec.g_estimates[i]);
      out << "]}\n";
      if (!log_knots_out.empty()) {
        std::ofstream kf(log_knots_out);
        if (!kf) throw ValidationError("cannot write knots file '" + log_knots_out + "'");
        write_knots_csv(kf, rec.knots);
      }
      return 0;
    }

    if (props_cmd->parsed()) {
      std::vector<Generator> gens;
      for (const auto& spec : props_specs) gens.push_back(parse_generator_spec(spec));
      if (props_format == "tsv") {
        out << property_table_tsv(gens);
      } else {
        out << property_table_json(gens);
      }
      return 0;
    }

    if (port_cmd->parsed()) {
      Generator g = parse_generator_spec(port_spec);
      Semigroup sg = build_semigroup(g, accuracy);
      ScenarioMatrix m = read_scenarios_csv(port_scen);
      PortfolioOptions popts;
      popts.starts = port_starts;
      popts.seed = port_seed;
      popts.index_tol = port_tol;
      PortfolioSolution sol = optimize(sg, m, popts);
      out << "{\"semigroup\":" << jstr(g.spec()) << ",\"scenarios\":" << jstr(port_scen)
          << ",\"starts\":" << port_starts << ",\"seed\":" << port_seed << ",\"direction\":[";
      for (size_t i = 0; i < sol.direction.size(); ++i)
        out << (i ? "," : "") << jnum(sol.direction[i]);
      out << "],\"alpha_star\":" << jnum(sol.alpha_star) << ",\"status\":"
          << jstr(to_string(sol.status)) << ",\"uniqueness\":"
          << (sol.uniqueness_flag ? "true" : "false") << ",\"arbitrage\":"
          << (sol.arbitrage ? "true" : "false")
          << ",\"objective_evaluations\":" << sol.objective_evaluations
          << ",\"start_results\":[";
      for (size_t i = 0; i < sol.starts.size(); ++i) {
        const auto& st = sol.starts[i];
        out << (i ? "," : "") << "{\"start\":[";
        for (size_t j = 0; j < st.start.size(); ++j) out << (j ? "," : "") << jnum(st.start[j]);
        out << "],\"direction\":[";
        for (size_t j = 0; j < st.direction.size(); ++j)
          out << (j ? "," : "") << jnum(st.direction[j]);
        out << "],\"alpha\":" << jnum(st.alpha) << ",\"status\":" << jstr(to_string(st.status))
            << '}';
      }
      out << "]}\n";
      return 0;
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace distortia::cli
