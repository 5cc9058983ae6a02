// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "doctest.h"
#include "sepenv/config.hpp"
#include "sepenv/rng.hpp"

using namespace sepenv;

TEST_CASE("run config round-trips losslessly") {
  RunConfig c;
  c.function = "exp(t1 + x1) + 0.1";
  c.family = {"t1*x1", "-t1*x1"};
  c.m = 1;
  c.n = 1;
  c.schedule_m = {Schedule::Kind::Geometric, 0.75, 1.5};
  c.profile = SmoothstepProfile::exponential();
  c.margin = 0.3;
  c.lift = Lift::L2;
  c.backend = LipschitzBackend{128, 3.25, 64};
  c.shells = 5;
  c.strict = true;
  c.verify.samples = 1234;
  c.verify.ulp_slack = true;
  c.sample.axis = SampleSettings::Axis::Slice;
  c.sample.lo = -0.1;
  c.demo.band = 0.2;
  c.demo.G = "t^2";
  c.seed = 18446744073709551615ull;
  c.out_dir = "out";

  const json j = to_json(c);
  CHECK(run_config_from_json(j) == c);
  CHECK(run_config_from_json(json::parse(j.dump())) == c);

  RunConfig d;
  CHECK(run_config_from_json(to_json(d)) == d);
  CHECK(run_config_from_json(json::object()) == d);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_config_from_json(json{{"functon", "t1"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"margin", 1.5}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"m", 0}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"schedule_m", {{"kind", "cubic"}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"schedule_m", {{"scale", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"backend", {{"kind", "interval"}, {"tol", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json{{"shells", "many"}}), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(json::array()), ConfigError);
}

TEST_CASE("flag parsers") {
  CHECK(parse_profile_flag("poly:5") == SmoothstepProfile::polynomial(5));
  CHECK(parse_profile_flag("exp") == SmoothstepProfile::exponential());
  CHECK_THROWS_AS(parse_profile_flag("poly:"), ConfigError);
  CHECK_THROWS_AS(parse_profile_flag("poly:3x"), ConfigError);
  CHECK_THROWS_AS(parse_profile_flag("cubic"), ConfigError);
  CHECK(parse_lift_flag("l2") == Lift::L2);
  CHECK_THROWS_AS(parse_lift_flag("l1"), ConfigError);
}

TEST_CASE("descriptor reload reproduces F and G") {
  RunConfig c;
  c.function = "sin(t1*x1) + t1^2 - x1";
  c.shells = 4;
  const AdditiveEnvelope env = build_additive(c.target(), c.envelope_config());
  env.precompute(c.shells);
  const json desc = envelope_descriptor(env, c);
  CHECK(desc["shells"].size() == 4);
  CHECK(desc["radii"]["m"].size() == 4);

  const LoadedEnvelope loaded = load_envelope_descriptor(json::parse(desc.dump()));
  CHECK(print(loaded.f) == print(env.function()));
  CHECK(loaded.env.shells().table() == env.shells().table());
  Rng rng(11);
  for (int s = 0; s < 2000; ++s) {
    const std::vector<double> p{rng.uniform(-2.5, 2.5)};
    CHECK(loaded.env.eval_F(p) == env.eval_F(p));
    CHECK(loaded.env.eval_G(p) == env.eval_G(p));
  }
  // Frozen: beyond the stored table evaluation refuses to extend it.
  CHECK_THROWS_AS(loaded.env.eval_F(std::vector<double>{50.0}), StrictModeError);

  json bad = desc;
  bad["format"] = "other";
  CHECK_THROWS_AS(load_envelope_descriptor(bad), ConfigError);
  bad = desc;
  bad["shells"].erase(0);
  CHECK_THROWS_AS(load_envelope_descriptor(bad), ConfigError);
}

TEST_CASE("report serialization") {
  VerificationReport r;
  r.check = "domination";
  r.seed = 7;
  r.samples = 10;
  r.stats["min_slack"] = 0.5;
  r.elapsed_seconds = 1.25;
  json j = to_json(r);
  CHECK(j["worst"].is_null());
  CHECK(j["passed"] == true);
  CHECK(j["meta"]["elapsed_seconds"] == 1.25);
  r.violations = 1;
  r.worst_point = {1.0, 2.0};
  r.worst_magnitude = 0.25;
  j = to_json(r);
  CHECK(j["worst"]["point"].size() == 2);
  CHECK(j["passed"] == false);
}
