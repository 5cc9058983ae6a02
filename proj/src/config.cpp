// SPDX-License-Identifier: Apache-2.0
#include "sepenv/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace sepenv {
namespace {

constexpr const char* kDescriptorFormat = "sepenv-envelope/1";

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(std::string("unknown key \"") + key + "\" in " + what);
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

json shell_table(const ShellMaxima& sm) {
  json arr = json::array();
  for (const auto& e : sm.table()) arr.push_back(to_json(e));
  return arr;
}

json radii(const Exhaustion& ex, std::size_t count) {
  json arr = json::array();
  for (std::size_t i = 1; i <= count; ++i) arr.push_back(ex.radius(i));
  return arr;
}

}  // namespace

Expr RunConfig::target() const {
  if (family.empty()) return parse(function, m, n);
  std::vector<Expr> members;
  for (const auto& s : family) members.push_back(parse(s, m, n));
  return pointwise_max(members);
}

EnvelopeConfig RunConfig::envelope_config() const {
  EnvelopeConfig e;
  e.schedule_m = schedule_m;
  e.schedule_n = schedule_n;
  e.profile = profile;
  e.margin = margin;
  e.lift = lift;
  e.backend = backend;
  e.shells.strict = strict;
  e.shells.ceiling = shells;
  return e;
}

json to_json(const Schedule& s) {
  return {{"kind", s.kind == Schedule::Kind::Linear ? "linear" : "geometric"}, {"scale", s.scale}, {"ratio", s.ratio}};
}

json to_json(const SmoothstepProfile& p) {
  if (p.kind() == SmoothstepProfile::Kind::Exponential) return {{"kind", "exp"}};
  return {{"kind", "poly"}, {"order", p.order()}};
}

json to_json(const MaxBackend& b) {
  if (const auto* ib = std::get_if<IntervalBackend>(&b))
    return {{"kind", "interval"}, {"tol", ib->tol}, {"max_subdiv", ib->max_subdiv}};
  const auto& lb = std::get<LipschitzBackend>(b);
  json j{{"kind", "lipschitz"}, {"grid", lb.grid}};
  j["L"] = lb.lipschitz ? json(*lb.lipschitz) : json(nullptr);
  j["samples"] = lb.estimate_samples;
  return j;
}

json to_json(const ShellEntry& e) {
  return {{"index", e.index},         {"value", e.value},         {"raw_upper", e.raw_upper},
          {"lower", e.lower},         {"certified", e.certified}, {"exhausted", e.exhausted}};
}

json to_json(const VerificationReport& r) {
  json worst = nullptr;
  if (!r.worst_point.empty()) worst = {{"point", r.worst_point}, {"magnitude", r.worst_magnitude}};
  json stats = json::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  return {{"check", r.check},
          {"seed", r.seed},
          {"samples", r.samples},
          {"violations", r.violations},
          {"passed", r.passed()},
          {"worst", worst},
          {"stats", stats},
          {"meta", {{"elapsed_seconds", r.elapsed_seconds}}}};
}

json to_json(const RunConfig& c) {
  const auto axis = c.sample.axis == SampleSettings::Axis::F ? "F" : c.sample.axis == SampleSettings::Axis::G ? "G" : "slice";
  return {
      {"function", c.function},
      {"family", c.family},
      {"m", c.m},
      {"n", c.n},
      {"schedule_m", to_json(c.schedule_m)},
      {"schedule_n", to_json(c.schedule_n)},
      {"profile", to_json(c.profile)},
      {"margin", c.margin},
      {"lift", c.lift == Lift::Linf ? "linf" : "l2"},
      {"backend", to_json(c.backend)},
      {"shells", c.shells},
      {"strict", c.strict},
      {"verify",
       {{"samples", c.verify.samples},
        {"shells", c.verify.shells},
        {"boundary_fraction", c.verify.boundary_fraction},
        {"ulp_slack", c.verify.ulp_slack},
        {"partition", c.verify.partition},
        {"multiplicative", c.verify.multiplicative},
        {"multiplicative_shells", c.verify.multiplicative_shells},
        {"controls", c.verify.controls}}},
      {"sample", {{"axis", axis}, {"lo", c.sample.lo}, {"hi", c.sample.hi}, {"points", c.sample.points}}},
      {"demo",
       {{"radius", c.demo.quadrature.radius},
        {"panels", c.demo.quadrature.panels},
        {"g", c.demo.g},
        {"h", c.demo.h},
        {"window", c.demo.window},
        {"x_steps", c.demo.x_steps},
        {"s_steps", c.demo.s_steps},
        {"band", c.demo.band ? json(*c.demo.band) : json(nullptr)},
        {"G", c.demo.G},
        {"evalmap_window", c.demo.evalmap_window},
        {"resolution", c.demo.resolution}}},
      {"out_dir", c.out_dir},
      {"seed", c.seed},
  };
}

Schedule schedule_from_json(const json& j) {
  require_object(j, "schedule");
  reject_unknown(j, {"kind", "scale", "ratio"}, "schedule");
  Schedule s;
  const auto kind = get<std::string>(j, "kind", "linear");
  if (kind == "linear")
    s.kind = Schedule::Kind::Linear;
  else if (kind == "geometric")
    s.kind = Schedule::Kind::Geometric;
  else
    throw ConfigError("schedule kind must be \"linear\" or \"geometric\"");
  s.scale = get<double>(j, "scale", 1.0);
  s.ratio = get<double>(j, "ratio", 2.0);
  try {
    (void)Exhaustion(1, s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

SmoothstepProfile profile_from_json(const json& j) {
  require_object(j, "profile");
  reject_unknown(j, {"kind", "order"}, "profile");
  const auto kind = get<std::string>(j, "kind", "poly");
  try {
    if (kind == "poly") return SmoothstepProfile::polynomial(get<int>(j, "order", 3));
    if (kind == "exp") return SmoothstepProfile::exponential();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("profile kind must be \"poly\" or \"exp\"");
}

MaxBackend backend_from_json(const json& j) {
  require_object(j, "backend");
  const auto kind = get<std::string>(j, "kind", "interval");
  if (kind == "interval") {
    reject_unknown(j, {"kind", "tol", "max_subdiv"}, "backend");
    IntervalBackend b;
    b.tol = get<double>(j, "tol", b.tol);
    b.max_subdiv = get<std::size_t>(j, "max_subdiv", b.max_subdiv);
    if (!(b.tol > 0.0)) throw ConfigError("backend tol must be positive");
    return b;
  }
  if (kind == "lipschitz") {
    reject_unknown(j, {"kind", "grid", "L", "samples"}, "backend");
    LipschitzBackend b;
    b.grid = get<std::size_t>(j, "grid", b.grid);
    if (j.contains("L") && !j.at("L").is_null()) b.lipschitz = get<double>(j, "L", 0.0);
    b.estimate_samples = get<std::size_t>(j, "samples", b.estimate_samples);
    if (b.grid < 2) throw ConfigError("backend grid must be >= 2");
    if (b.lipschitz && !(*b.lipschitz >= 0.0)) throw ConfigError("backend L must be >= 0");
    return b;
  }
  throw ConfigError("backend kind must be \"interval\" or \"lipschitz\"");
}

RunConfig run_config_from_json(const json& j) {
  require_object(j, "config");
  reject_unknown(j,
                 {"function", "family", "m", "n", "schedule_m", "schedule_n", "profile", "margin", "lift", "backend",
                  "shells", "strict", "verify", "sample", "demo", "out_dir", "seed"},
                 "config");
  RunConfig c;
  c.function = get<std::string>(j, "function", c.function);
  c.family = get<std::vector<std::string>>(j, "family", c.family);
  c.m = get<int>(j, "m", c.m);
  c.n = get<int>(j, "n", c.n);
  if (c.m < 1 || c.n < 1) throw ConfigError("m and n must be >= 1");
  if (j.contains("schedule_m")) c.schedule_m = schedule_from_json(j.at("schedule_m"));
  if (j.contains("schedule_n")) c.schedule_n = schedule_from_json(j.at("schedule_n"));
  if (j.contains("profile")) c.profile = profile_from_json(j.at("profile"));
  c.margin = get<double>(j, "margin", c.margin);
  if (!(c.margin > 0.0 && c.margin < 1.0)) throw ConfigError("margin must lie in (0, 1)");
  if (j.contains("lift")) c.lift = parse_lift_flag(get<std::string>(j, "lift", "linf"));
  if (j.contains("backend")) c.backend = backend_from_json(j.at("backend"));
  c.shells = get<std::size_t>(j, "shells", c.shells);
  if (c.shells < 1) throw ConfigError("shells must be >= 1");
  c.strict = get<bool>(j, "strict", c.strict);

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    require_object(v, "verify");
    reject_unknown(v, {"samples", "shells", "boundary_fraction", "ulp_slack", "partition", "multiplicative",
                   "multiplicative_shells", "controls"},
                   "verify");
    c.verify.samples = get<std::size_t>(v, "samples", c.verify.samples);
    c.verify.shells = get<std::size_t>(v, "shells", c.verify.shells);
    c.verify.boundary_fraction = get<double>(v, "boundary_fraction", c.verify.boundary_fraction);
    c.verify.ulp_slack = get<bool>(v, "ulp_slack", c.verify.ulp_slack);
    c.verify.partition = get<bool>(v, "partition", c.verify.partition);
    c.verify.multiplicative = get<bool>(v, "multiplicative", c.verify.multiplicative);
    c.verify.multiplicative_shells = get<std::size_t>(v, "multiplicative_shells", c.verify.multiplicative_shells);
    c.verify.controls = get<bool>(v, "controls", c.verify.controls);
    if (c.verify.shells < 1 || c.verify.multiplicative_shells < 1) throw ConfigError("verify shell counts must be >= 1");
    if (!(c.verify.boundary_fraction >= 0.0 && c.verify.boundary_fraction <= 1.0))
      throw ConfigError("verify.boundary_fraction must lie in [0, 1]");
  }
  if (j.contains("sample")) {
    const json& s = j.at("sample");
    require_object(s, "sample");
    reject_unknown(s, {"axis", "lo", "hi", "points"}, "sample");
    const auto axis = get<std::string>(s, "axis", "F");
    if (axis == "F")
      c.sample.axis = SampleSettings::Axis::F;
    else if (axis == "G")
      c.sample.axis = SampleSettings::Axis::G;
    else if (axis == "slice")
      c.sample.axis = SampleSettings::Axis::Slice;
    else
      throw ConfigError("sample.axis must be \"F\", \"G\" or \"slice\"");
    c.sample.lo = get<double>(s, "lo", c.sample.lo);
    c.sample.hi = get<double>(s, "hi", c.sample.hi);
    c.sample.points = get<std::size_t>(s, "points", c.sample.points);
    if (!(c.sample.lo <= c.sample.hi) || c.sample.points < 1) throw ConfigError("bad sample grid");
  }
  if (j.contains("demo")) {
    const json& d = j.at("demo");
    require_object(d, "demo");
    reject_unknown(d,
                   {"radius", "panels", "g", "h", "window", "x_steps", "s_steps", "band", "G", "evalmap_window",
                    "resolution"},
                   "demo");
    c.demo.quadrature.radius = get<double>(d, "radius", c.demo.quadrature.radius);
    c.demo.quadrature.panels = get<std::size_t>(d, "panels", c.demo.quadrature.panels);
    c.demo.g = get<std::string>(d, "g", c.demo.g);
    c.demo.h = get<std::string>(d, "h", c.demo.h);
    c.demo.window = get<double>(d, "window", c.demo.window);
    c.demo.x_steps = get<std::size_t>(d, "x_steps", c.demo.x_steps);
    c.demo.s_steps = get<std::size_t>(d, "s_steps", c.demo.s_steps);
    if (d.contains("band") && !d.at("band").is_null()) c.demo.band = get<double>(d, "band", 0.0);
    c.demo.G = get<std::string>(d, "G", c.demo.G);
    c.demo.evalmap_window = get<double>(d, "evalmap_window", c.demo.evalmap_window);
    c.demo.resolution = get<std::size_t>(d, "resolution", c.demo.resolution);
  }
  c.out_dir = get<std::string>(j, "out_dir", c.out_dir);
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  return c;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(load_json(path)); }

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
}

SmoothstepProfile parse_profile_flag(const std::string& s) {
  if (s == "exp") return SmoothstepProfile::exponential();
  if (s.rfind("poly:", 0) == 0) {
    int k = 0;
    const char* first = s.data() + 5;
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec == std::errc() && ptr == last && first != last) {
      try {
        return SmoothstepProfile::polynomial(k);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  throw ConfigError("profile must be poly:K or exp, got \"" + s + "\"");
}

Lift parse_lift_flag(const std::string& s) {
  if (s == "linf") return Lift::Linf;
  if (s == "l2") return Lift::L2;
  throw ConfigError("lift must be linf or l2, got \"" + s + "\"");
}

json envelope_descriptor(const AdditiveEnvelope& env, const RunConfig& cfg) {
  const auto& sm = env.shells();
  const std::size_t count = sm.table().size();
  return {
      {"format", kDescriptorFormat},
      {"function", print(env.function())},
      {"m", env.function().m()},
      {"n", env.function().n()},
      {"schedule_m", to_json(env.pou_m().exhaustion().schedule())},
      {"schedule_n", to_json(env.pou_n().exhaustion().schedule())},
      {"radii", {{"m", radii(env.pou_m().exhaustion(), count)}, {"n", radii(env.pou_n().exhaustion(), count)}}},
      {"profile", to_json(env.pou_m().profile())},
      {"margin", env.pou_m().margin()},
      {"lift", env.pou_m().lift() == Lift::Linf ? "linf" : "l2"},
      {"backend", to_json(sm.backend())},
      {"shells", shell_table(sm)},
      {"config", to_json(cfg)},
  };
}

LoadedEnvelope load_envelope_descriptor(const json& j) {
  require_object(j, "descriptor");
  if (get<std::string>(j, "format", "") != kDescriptorFormat) throw ConfigError("not an envelope descriptor");
  const int m = get<int>(j, "m", 0), n = get<int>(j, "n", 0);
  Expr f;
  try {
    f = parse(get<std::string>(j, "function", ""), m, n);
  } catch (const ExprError& e) {
    throw ConfigError(std::string("descriptor function: ") + e.what());
  }
  const Schedule sm = schedule_from_json(j.at("schedule_m")), sn = schedule_from_json(j.at("schedule_n"));
  const SmoothstepProfile profile = profile_from_json(j.at("profile"));
  const double margin = get<double>(j, "margin", 0.1);
  const Lift lift = parse_lift_flag(get<std::string>(j, "lift", "linf"));
  const MaxBackend backend = backend_from_json(j.at("backend"));

  std::vector<ShellEntry> table;
  for (const auto& e : j.at("shells")) {
    ShellEntry s;
    s.index = get<std::size_t>(e, "index", 0);
    s.value = get<double>(e, "value", 0.0);
    s.raw_upper = get<double>(e, "raw_upper", 0.0);
    s.lower = get<double>(e, "lower", 0.0);
    s.certified = get<bool>(e, "certified", false);
    s.exhausted = get<bool>(e, "exhausted", false);
    if (s.index != table.size() + 1) throw ConfigError("descriptor shell table is not numbered 1, 2, ...");
    table.push_back(s);
  }
  const Exhaustion ex_m(m, sm), ex_n(n, sn);
  auto shells = std::make_shared<const ShellMaxima>(
      ShellMaxima::from_table(f, ProductExhaustion(ex_m, ex_n), std::move(table), backend));
  return {f, AdditiveEnvelope(std::move(shells), PartitionOfUnity(ex_m, profile, margin, lift),
                              PartitionOfUnity(ex_n, profile, margin, lift))};
}

}  // namespace sepenv
