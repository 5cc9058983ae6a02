// SPDX-License-Identifier: Apache-2.0
#include "sepenv/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"

namespace sepenv::cli {
namespace fs = std::filesystem;

namespace {

const char* axis_name(SampleSettings::Axis a) {
  switch (a) {
    case SampleSettings::Axis::F: return "F";
    case SampleSettings::Axis::G: return "G";
    case SampleSettings::Axis::Slice: return "slice";
  }
  return "?";
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

// Grid point k of count over [lo, hi], endpoints exact.
double grid_at(double lo, double hi, std::size_t k, std::size_t count) {
  if (count == 1) return lo;
  if (k + 1 == count) return hi;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
}

// u placed on the first coordinate axis of a dim-dimensional factor.
std::vector<double> on_axis(double u, int dim) {
  std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
  p[0] = u;
  return p;
}

SamplerConfig sampler_of(const RunConfig& cfg, std::size_t shells) {
  SamplerConfig s;
  s.samples = cfg.verify.samples;
  s.seed = cfg.seed;
  s.shells = shells;
  s.boundary_fraction = cfg.verify.boundary_fraction;
  s.ulp_slack = cfg.verify.ulp_slack;
  return s;
}

AdditiveEnvelope build_from(const RunConfig& cfg) {
  const EnvelopeConfig ec = cfg.envelope_config();
  if (cfg.family.empty()) return build_additive(parse(cfg.function, cfg.m, cfg.n), ec);
  std::vector<Expr> members;
  for (const auto& s : cfg.family) members.push_back(parse(s, cfg.m, cfg.n));
  return build_additive_family(members, ec);
}

void write_json(const json& j, const fs::path& p) { save_json(j, p.string()); }

json witness_json(const std::optional<ViolationWitness>& w) {
  if (!w) return nullptr;
  return {{"t", w->t}, {"x", w->x}, {"f", w->f}, {"g+h", w->gh}, {"excess", w->excess}};
}

json evalmap_case_json(const std::string& G, double window, std::size_t resolution, const EvalMapReport& r) {
  json w = nullptr;
  if (r.witness) w = {{"stage", r.witness->stage}, {"y", r.witness->y}, {"lhs", r.witness->lhs}, {"rhs", r.witness->rhs}};
  return {{"G", G},
          {"window", window},
          {"resolution", resolution},
          {"c0", r.c0},
          {"c1", r.c1 ? json(*r.c1) : json(nullptr)},
          {"budget", r.budget},
          {"witness", w}};
}

struct Check {
  json report;
  bool ok;
  std::string line;
};

Check make_check(const VerificationReport& r, const std::string& name) {
  json j = to_json(r);
  j["check"] = name;
  return {j, r.passed(),
          name + ": " + std::to_string(r.violations) + " violations in " + std::to_string(r.samples) + " samples"};
}

// A control passes when the corrupted envelope is caught.
Check make_control(const VerificationReport& r, const std::string& name) {
  Check c = make_check(r, name);
  c.ok = r.violations > 0;
  c.report["control"] = true;
  c.report["passed"] = c.ok;
  c.line += c.ok ? " (corruption detected)" : " (corruption NOT detected)";
  return c;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const StrictModeError& e) {
    err << "error: " << e.what() << '\n';
    return kStrictBudget;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return kUserError;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kUserError;
  } catch (const ExprError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const ShellError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  }
}

int cmd_build(const RunConfig& cfg, std::ostream& out) {
  const AdditiveEnvelope env = build_from(cfg);
  env.precompute(cfg.shells);
  const fs::path path = out_path(cfg, "envelope.json");
  write_json(envelope_descriptor(env, cfg), path);

  out << "function: " << print(env.function()) << "  (m=" << cfg.m << ", n=" << cfg.n << ")\n";
  out << "shell  A_i                      raw_upper                certified\n";
  for (const auto& e : env.shells().table()) {
    out << e.index << "  " << format_double(e.value) << "  " << format_double(e.raw_upper) << "  "
        << (e.certified ? "yes" : (e.exhausted ? "no (budget exhausted)" : "no")) << '\n';
  }
  out << "descriptor: " << path.string() << '\n';
  return kOk;
}

int cmd_sample(const RunConfig& cfg, const std::string& descriptor_path, std::ostream& out) {
  if (!fs::exists(descriptor_path)) throw ConfigError("descriptor not found: " + descriptor_path);
  const LoadedEnvelope loaded = load_envelope_descriptor(load_json(descriptor_path));
  const AdditiveEnvelope& env = loaded.env;
  const int m = loaded.f.m(), n = loaded.f.n();
  const auto& s = cfg.sample;

  const fs::path path = out_path(cfg, std::string("sample-") + axis_name(s.axis) + ".csv");
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw ConfigError("cannot write " + path.string());
  std::size_t rows = 0;
  switch (s.axis) {
    case SampleSettings::Axis::F:
    case SampleSettings::Axis::G: {
      const bool isF = s.axis == SampleSettings::Axis::F;
      csv << (isF ? "u,F\n" : "u,G\n");
      for (std::size_t k = 0; k < s.points; ++k) {
        const double u = grid_at(s.lo, s.hi, k, s.points);
        const double v = isF ? env.eval_F(on_axis(u, m)) : env.eval_G(on_axis(u, n));
        csv << format_double(u) << ',' << format_double(v) << '\n';
        ++rows;
      }
      break;
    }
    case SampleSettings::Axis::Slice: {
      csv << "t,x,f,F+G,slack\n";
      std::vector<double> G(s.points);
      for (std::size_t k = 0; k < s.points; ++k) G[k] = env.eval_G(on_axis(grid_at(s.lo, s.hi, k, s.points), n));
      for (std::size_t a = 0; a < s.points; ++a) {
        const double u = grid_at(s.lo, s.hi, a, s.points);
        const auto t = on_axis(u, m);
        const double F = env.eval_F(t);
        for (std::size_t b = 0; b < s.points; ++b) {
          const double v = grid_at(s.lo, s.hi, b, s.points);
          const double fv = eval_point(loaded.f, t, on_axis(v, n));
          const double sum = F + G[b];
          csv << format_double(u) << ',' << format_double(v) << ',' << format_double(fv) << ','
              << format_double(sum) << ',' << format_double(sum - fv) << '\n';
          ++rows;
        }
      }
      break;
    }
  }
  out << "wrote " << rows << " rows to " << path.string() << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  std::vector<Check> checks;
  const Expr f = cfg.target();
  const AdditiveEnvelope env = build_from(cfg);
  checks.push_back(make_check(check_domination(env, f, sampler_of(cfg, cfg.verify.shells)), "domination"));

  if (cfg.verify.partition) {
    checks.push_back(make_check(check_partition(env.pou_m(), sampler_of(cfg, cfg.verify.shells)), "partition-t"));
    checks.push_back(make_check(check_partition(env.pou_n(), sampler_of(cfg, cfg.verify.shells)), "partition-x"));
  }
  if (cfg.verify.multiplicative) {
    const MultiplicativeEnvelope menv = build_multiplicative(f, cfg.envelope_config());
    checks.push_back(
        make_check(check_multiplicative(menv, f, sampler_of(cfg, cfg.verify.multiplicative_shells)), "multiplicative"));
  }
  if (cfg.verify.controls) {
    // Packaged functions with known-good envelopes, corrupted on purpose.
    const EnvelopeConfig plain;
    const Expr fa = parse("abs(t1)*abs(x1)", 1, 1);
    const AdditiveEnvelope good_a = build_additive(fa, plain);
    checks.push_back(make_control(check_domination(corrupt_shell(good_a, 2, 0.1, 12), fa, sampler_of(cfg, 10)),
                                  "control-additive"));
    const Expr fm = parse("exp(t1+x1)", 1, 1);
    const MultiplicativeEnvelope good_m = build_multiplicative(fm, plain);
    const MultiplicativeEnvelope bad_m(good_m.upper_additive(), corrupt_shell(good_m.lower_additive(), 2, 0.0, 5));
    checks.push_back(make_control(check_multiplicative(bad_m, fm, sampler_of(cfg, 3)), "control-multiplicative"));
  }

  bool all = true;
  for (const auto& c : checks) {
    write_json(c.report, out_path(cfg, "verify-" + c.report["check"].get<std::string>() + ".json"));
    out << (c.ok ? "PASS  " : "FAIL  ") << c.line << '\n';
    all = all && c.ok;
  }
  return all ? kOk : kVerificationFailed;
}

json l1_demo_report(const RunConfig& cfg) {
  const auto& d = cfg.demo;
  const L1Demo demo(gaussian_density(), d.quadrature);
  const L1Integral integral = l1_integral(demo);
  ViolationSearch search;
  search.window = d.window;
  search.x_steps = d.x_steps;
  search.s_steps = d.s_steps;
  search.band = d.band;
  const ViolationResult v = find_violation(demo, parse(d.g, 1, 0), parse(d.h, 1, 0), search);
  return {
      {"demo", "l1"},
      {"density", print(demo.rho())},
      {"integral", integral.value},
      {"skipped_nodes", integral.skipped},
      {"warnings", integral.warnings},
      {"g", d.g},
      {"h", d.h},
      {"witness", witness_json(v.witness)},
      {"budget", v.budget},
      {"band", v.band},
      {"config",
       {{"radius", d.quadrature.radius},
        {"panels", d.quadrature.panels},
        {"window", d.window},
        {"x_steps", d.x_steps},
        {"s_steps", d.s_steps}}},
  };
}

json evalmap_demo_report(const RunConfig& cfg) {
  const auto& d = cfg.demo;
  std::vector<EvalMapCase> cases;
  if (d.G.empty())
    cases = packaged_evalmap_family();
  else
    cases.push_back({d.G, d.evalmap_window});
  json arr = json::array();
  std::size_t refuted = 0;
  for (const auto& c : cases) {
    EvalMapDemo demo{parse(c.G, 1, 0), packaged_oracle(), c.window, d.resolution};
    const EvalMapReport r = eval_map_falsify(demo);
    refuted += r.witness ? 1 : 0;
    arr.push_back(evalmap_case_json(c.G, c.window, d.resolution, r));
  }
  return {{"demo", "evalmap"}, {"oracle", "max over |y| <= 1 of the values, plus 1"},
          {"cases", arr},      {"refuted", refuted},
          {"total", cases.size()}};
}

int cmd_demo(const std::string& which, const RunConfig& cfg, std::ostream& out) {
  json rep;
  if (which == "l1") {
    rep = l1_demo_report(cfg);
    out << "integral over [-R, R]^2: " << format_double(rep["integral"].get<double>()) << '\n';
    if (rep["witness"].is_null())
      out << "no violation of f <= g + h found in the scanned band\n";
    else
      out << "witness: t=" << format_double(rep["witness"]["t"].get<double>())
          << " x=" << format_double(rep["witness"]["x"].get<double>())
          << " excess=" << format_double(rep["witness"]["excess"].get<double>()) << '\n';
  } else if (which == "evalmap") {
    rep = evalmap_demo_report(cfg);
    for (const auto& c : rep["cases"]) {
      out << "G=" << c["G"].get<std::string>() << ": ";
      if (c["witness"].is_null())
        out << "no witness\n";
      else
        out << "stage " << c["witness"]["stage"].get<int>()
            << " witness at y=" << format_double(c["witness"]["y"].get<double>()) << '\n';
    }
    out << "refuted " << rep["refuted"].get<std::size_t>() << " of " << rep["total"].get<std::size_t>() << '\n';
  } else {
    throw ConfigError("demo must be l1 or evalmap, got \"" + which + "\"");
  }
  const fs::path path = out_path(cfg, "demo-" + which + ".json");
  write_json(rep, path);
  out << "report: " << path.string() << '\n';
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separable envelopes F(t) + G(x) >= f(t, x): build, sample, verify, demo"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, profile, lift, function, descriptor, axis, which;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shells, samples;
  std::optional<double> tol;
  std::optional<int> m, n;
  std::vector<std::string> family;
  std::optional<std::string> g, h, G;
  bool strict = false, multiplicative = false, no_controls = false;

  app.add_option("--config", config_path, "run config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--shells", shells, "shells to precompute (strict-mode ceiling)");
  app.add_option("--tol", tol, "interval backend tolerance");
  app.add_option("--profile", profile, "poly:K or exp");
  app.add_option("--lift", lift, "linf or l2");
  app.add_option("--function", function, "f(t, x) source text");
  app.add_option("--family", family, "family members (envelope of their max)");
  app.add_option("-m", m, "dimension of t");
  app.add_option("-n", n, "dimension of x");
  app.add_flag("--strict", strict, "fail instead of computing past the shell ceiling");

  auto* build = app.add_subcommand("build", "compute the shell table and write the envelope descriptor");
  auto* sample = app.add_subcommand("sample", "tabulate F, G or a domination slice as CSV");
  sample->add_option("--descriptor", descriptor, "envelope descriptor (default <out>/envelope.json)");
  sample->add_option("--axis", axis, "F, G, slice or sum-slice");
  auto* verify = app.add_subcommand("verify", "sampled domination, partition and control checks");
  verify->add_option("--samples", samples, "samples per check");
  verify->add_flag("--multiplicative", multiplicative, "also check the two-sided multiplicative envelope");
  verify->add_flag("--no-controls", no_controls, "skip the corrupted-envelope controls");
  auto* demo = app.add_subcommand("demo", "counterexample demonstrations");
  demo->add_option("which", which, "l1 or evalmap")->required();
  demo->add_option("--g-expr", g, "g(t) for the l1 violation search");
  demo->add_option("--h-expr", h, "h(t) for the l1 violation search");
  demo->add_option("--G-expr", G, "single G(t) for the eval-map falsifier");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUserError;
  }

  return guarded(
      [&] {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (shells) cfg.shells = *shells;
        if (tol) {
          auto* ib = std::get_if<IntervalBackend>(&cfg.backend);
          if (!ib) throw ConfigError("--tol applies to the interval backend only");
          ib->tol = *tol;
        }
        if (!profile.empty()) cfg.profile = parse_profile_flag(profile);
        if (!lift.empty()) cfg.lift = parse_lift_flag(lift);
        if (!function.empty()) {
          cfg.function = function;
          cfg.family.clear();
        }
        if (!family.empty()) cfg.family = family;
        if (m) cfg.m = *m;
        if (n) cfg.n = *n;
        if (strict) cfg.strict = true;
        if (samples) cfg.verify.samples = *samples;
        if (multiplicative) cfg.verify.multiplicative = true;
        if (no_controls) cfg.verify.controls = false;
        if (g) cfg.demo.g = *g;
        if (h) cfg.demo.h = *h;
        if (G) cfg.demo.G = *G;
        if (!axis.empty()) {
          if (axis == "F")
            cfg.sample.axis = SampleSettings::Axis::F;
          else if (axis == "G")
            cfg.sample.axis = SampleSettings::Axis::G;
          else if (axis == "slice" || axis == "sum-slice")
            cfg.sample.axis = SampleSettings::Axis::Slice;
          else
            throw ConfigError("--axis must be F, G, slice or sum-slice");
        }
        // Flag overrides go through the same validation as the file.
        cfg = run_config_from_json(to_json(cfg));
        save_json(to_json(cfg), out_path(cfg, "config.json").string());

        if (*build) return cmd_build(cfg, out);
        if (*sample)
          return cmd_sample(cfg, descriptor.empty() ? (fs::path(cfg.out_dir) / "envelope.json").string() : descriptor,
                            out);
        if (*verify) return cmd_verify(cfg, out);
        return cmd_demo(which, cfg, out);
      },
      err);
}

}  // namespace sepenv::cli
