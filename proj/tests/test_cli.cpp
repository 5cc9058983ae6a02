// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sepenv/cli.hpp"
#include "support/oracles.hpp"

using namespace sepenv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run sepenv_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sepenv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sepenv_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header) {
  std::ifstream in(p, std::ios::binary);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      double v = 0;
      const auto res = std::from_chars(line.data() + start, line.data() + end, v);
      REQUIRE(res.ec == std::errc());
      REQUIRE(res.ptr == line.data() + end);
      row.push_back(v);
      start = end + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

// Report content without the metadata field.
std::string without_meta(const fs::path& p) {
  json j = json::parse(slurp(p));
  j.erase("meta");
  return j.dump();
}

}  // namespace

TEST_CASE("build writes the shell table") {
  const auto dir = scratch("build");
  const auto r = sepenv_cli({"build", "--out", dir.string(), "--shells", "4"});
  REQUIRE(r.code == cli::kOk);
  const json d = json::parse(slurp(dir / "envelope.json"));
  REQUIRE(d["shells"].size() == 4);
  const Expr f = parse("abs(t1)*abs(x1)", 1, 1);
  for (std::size_t i = 1; i <= 4; ++i) {
    const double ri = static_cast<double>(i);
    const double brute = testing::grid_max(f, Box({{-ri, ri}, {-ri, ri}}, Side::Product), 101);
    CHECK(std::fabs(d["shells"][i - 1]["value"].get<double>() - brute) <= 1e-3);
    CHECK(d["shells"][i - 1]["certified"] == true);
  }
  CHECK(d["config"]["shells"] == 4);
  CHECK(run_config_from_json(json::parse(slurp(dir / "config.json"))).shells == 4);

  const auto z = scratch("build_zero");
  REQUIRE(sepenv_cli({"build", "--out", z.string(), "--function", "0", "--shells", "3"}).code == cli::kOk);
  for (const auto& e : json::parse(slurp(z / "envelope.json"))["shells"]) CHECK(e["value"] == 0.0);
}

TEST_CASE("user errors exit 2") {
  const auto dir = scratch("errors");
  auto r = sepenv_cli({"build", "--out", dir.string(), "--function", "t1 +* x1"});
  CHECK(r.code == cli::kUserError);
  CHECK(r.err.find("offset 4") != std::string::npos);
  CHECK(sepenv_cli({"build", "--out", dir.string(), "--profile", "cubic"}).code == cli::kUserError);
  CHECK(sepenv_cli({"build", "--out", dir.string(), "--lift", "l1"}).code == cli::kUserError);
  CHECK(sepenv_cli({"build", "--bogus"}).code == cli::kUserError);
  CHECK(sepenv_cli({}).code == cli::kUserError);
  CHECK(sepenv_cli({"demo", "other", "--out", dir.string()}).code == cli::kUserError);
  r = sepenv_cli({"sample", "--descriptor", (dir / "missing.json").string(), "--out", dir.string()});
  CHECK(r.code == cli::kUserError);
  CHECK(r.err.find("descriptor not found") != std::string::npos);
  CHECK(sepenv_cli({"build", "--config", (dir / "nope.json").string()}).code == cli::kUserError);
  CHECK(sepenv_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("strict mode exits 3 past the ceiling") {
  const auto dir = scratch("strict");
  REQUIRE(sepenv_cli({"build", "--out", dir.string(), "--shells", "2", "--strict"}).code == cli::kOk);
  // The default grid reaches |u| = 5, beyond the two stored shells.
  CHECK(sepenv_cli({"sample", "--out", dir.string(), "--axis", "F"}).code == cli::kStrictBudget);
  CHECK(sepenv_cli({"verify", "--out", dir.string(), "--shells", "2", "--strict", "--samples", "100"}).code ==
        cli::kStrictBudget);
}

TEST_CASE("sample CSVs") {
  const auto dir = scratch("sample");
  REQUIRE(sepenv_cli({"build", "--out", dir.string(), "--function", "2.5", "--shells", "8"}).code == cli::kOk);
  REQUIRE(sepenv_cli({"sample", "--out", dir.string(), "--axis", "F"}).code == cli::kOk);
  std::string header;
  auto rows = read_csv(dir / "sample-F.csv", header);
  CHECK(header == "u,F");
  CHECK(rows.size() == 101);
  for (const auto& row : rows) CHECK(row[1] == 2.5);
  CHECK(rows.front()[0] == -5.0);
  CHECK(rows.back()[0] == 5.0);

  const auto d2 = scratch("sample_slice");
  REQUIRE(sepenv_cli({"build", "--out", d2.string(), "--function", "sin(t1*x1) + t1 - x1^2", "--shells", "8"}).code ==
          cli::kOk);
  std::ofstream(d2 / "grid.json") << R"({"sample": {"axis": "slice", "lo": -3, "hi": 4, "points": 23}})";
  const auto before = sepenv_cli({"sample", "--out", d2.string(), "--config", (d2 / "grid.json").string()});
  REQUIRE(before.code == cli::kOk);
  const std::string bytes = slurp(d2 / "sample-slice.csv");
  CHECK(bytes.find('\r') == std::string::npos);
  rows = read_csv(d2 / "sample-slice.csv", header);
  CHECK(header == "t,x,f,F+G,slack");
  CHECK(rows.size() == 23 * 23);
  const Expr f = parse("sin(t1*x1) + t1 - x1^2", 1, 1);
  for (const auto& row : rows) {
    CHECK(row[4] >= 0.0);
    CHECK(row[2] == eval_point(f, std::vector<double>{row[0], row[1]}));
    CHECK(row[4] == row[3] - row[2]);
  }
  // Re-running is byte-identical.
  REQUIRE(sepenv_cli({"sample", "--out", d2.string(), "--config", (d2 / "grid.json").string()}).code == cli::kOk);
  CHECK(slurp(d2 / "sample-slice.csv") == bytes);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 4.000000000000001, 0.0}) {
    const std::string s = cli::format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("verify reports and determinism") {
  const auto a = scratch("verify_a"), b = scratch("verify_b");
  for (const auto& dir : {a, b}) {
    const auto r = sepenv_cli({"verify", "--out", dir.string(), "--function", "exp(t1*x1/4)", "--samples", "20000",
                               "--seed", "5", "--multiplicative"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
  for (const char* name : {"verify-domination.json", "verify-partition-t.json", "verify-partition-x.json",
                           "verify-multiplicative.json", "verify-control-additive.json",
                           "verify-control-multiplicative.json"}) {
    CHECK(fs::exists(a / name));
    CHECK(without_meta(a / name) == without_meta(b / name));
  }
  const json dom = json::parse(slurp(a / "verify-domination.json"));
  CHECK(dom["seed"] == 5);
  CHECK(dom["violations"] == 0);
  const json ctl = json::parse(slurp(a / "verify-control-additive.json"));
  CHECK(ctl["violations"].get<int>() >= 1);
  CHECK(ctl["passed"] == true);

  // A non-positive f cannot have a multiplicative envelope.
  CHECK(sepenv_cli({"verify", "--out", a.string(), "--function", "t1*x1", "--samples", "100", "--multiplicative",
                    "--no-controls"})
            .code == cli::kUserError);
}

TEST_CASE("demos") {
  const auto dir = scratch("demo");
  REQUIRE(sepenv_cli({"demo", "l1", "--out", dir.string(), "--g-expr", "0", "--h-expr", "0"}).code == cli::kOk);
  const json l1 = json::parse(slurp(dir / "demo-l1.json"));
  CHECK(std::fabs(l1["integral"].get<double>() - 1.0) <= 1e-3);
  const double rho0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(std::fabs(l1["witness"]["excess"].get<double>() - rho0) <= 1e-12);

  REQUIRE(sepenv_cli({"demo", "evalmap", "--out", dir.string(), "--G-expr", "t"}).code == cli::kOk);
  json em = json::parse(slurp(dir / "demo-evalmap.json"));
  REQUIRE(em["cases"].size() == 1);
  CHECK(em["cases"][0]["witness"]["stage"] == 1);

  REQUIRE(sepenv_cli({"demo", "evalmap", "--out", dir.string()}).code == cli::kOk);
  em = json::parse(slurp(dir / "demo-evalmap.json"));
  CHECK(em["refuted"] == 10);
  CHECK(em["total"] == 10);
}
