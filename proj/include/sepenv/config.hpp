// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sepenv/counterexamples.hpp"
#include "sepenv/envelope.hpp"
#include "sepenv/verify.hpp"

namespace sepenv {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration / descriptor content.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifySettings {
  std::size_t samples = 100000;
  std::size_t shells = 10;  // sample radius r_shells per factor
  double boundary_fraction = 0.2;
  bool ulp_slack = false;
  bool partition = true;
  bool multiplicative = false;
  std::size_t multiplicative_shells = 3;  // exp(f) outgrows double range fast
  bool controls = true;  // run the corrupted-envelope sensitivity controls
  friend bool operator==(const VerifySettings&, const VerifySettings&) = default;
};

struct SampleSettings {
  enum class Axis { F, G, Slice };
  Axis axis = Axis::F;
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points = 101;
  friend bool operator==(const SampleSettings&, const SampleSettings&) = default;
};

struct DemoSettings {
  QuadratureConfig quadrature{};
  std::string g = "exp(-abs(t))";
  std::string h = "exp(-abs(t))";
  double window = 20.0;
  std::size_t x_steps = 20001;
  std::size_t s_steps = 21;
  std::optional<double> band;
  std::string G;  // empty: the packaged eval-map family
  double evalmap_window = 10.0;
  std::size_t resolution = 2001;
  friend bool operator==(const DemoSettings&, const DemoSettings&) = default;
};

struct RunConfig {
  std::string function = "abs(t1)*abs(x1)";
  std::vector<std::string> family;  // nonempty: envelope of their pointwise max
  int m = 1;
  int n = 1;
  Schedule schedule_m{};
  Schedule schedule_n{};
  SmoothstepProfile profile = SmoothstepProfile::polynomial(3);
  double margin = 0.1;
  Lift lift = Lift::Linf;
  MaxBackend backend = IntervalBackend{};
  std::size_t shells = 8;  // shells precomputed by build; strict-mode ceiling
  bool strict = false;
  VerifySettings verify{};
  SampleSettings sample{};
  DemoSettings demo{};
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// The function, or the pointwise max of the family.
  Expr target() const;
  EnvelopeConfig envelope_config() const;
};

json to_json(const Schedule& s);
json to_json(const SmoothstepProfile& p);
json to_json(const MaxBackend& b);
json to_json(const RunConfig& c);
json to_json(const VerificationReport& r);
json to_json(const ShellEntry& e);

Schedule schedule_from_json(const json& j);
SmoothstepProfile profile_from_json(const json& j);
MaxBackend backend_from_json(const json& j);
RunConfig run_config_from_json(const json& j);

RunConfig load_run_config(const std::string& path);
void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

/// "poly:K" or "exp".
SmoothstepProfile parse_profile_flag(const std::string& s);
Lift parse_lift_flag(const std::string& s);

/// Everything needed to re-evaluate F and G: function, radii, profile,
/// margin, lift, backend and the shell table with certificate flags.
json envelope_descriptor(const AdditiveEnvelope& env, const RunConfig& cfg);

struct LoadedEnvelope {
  Expr f;
  AdditiveEnvelope env;
};
/// Frozen envelope: evaluation past the stored table raises StrictModeError.
LoadedEnvelope load_envelope_descriptor(const json& j);

}  // namespace sepenv
