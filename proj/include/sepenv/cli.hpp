// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <ostream>
#include <string>

#include "sepenv/config.hpp"

namespace sepenv::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUserError = 2,
  kStrictBudget = 3,
};

/// Full command line: sepenv <build|sample|verify|demo> [flags].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs body, mapping library exceptions onto exit codes with a message on err.
int guarded(const std::function<int()>& body, std::ostream& err);

/// Writes <out>/envelope.json; prints the shell table.
int cmd_build(const RunConfig& cfg, std::ostream& out);

/// Writes <out>/sample-<axis>.csv from a stored descriptor.
int cmd_sample(const RunConfig& cfg, const std::string& descriptor_path, std::ostream& out);

/// Writes <out>/verify-<check>.json per check; kVerificationFailed unless all
/// checks pass and every sensitivity control detects its corruption.
int cmd_verify(const RunConfig& cfg, std::ostream& out);

/// which: "l1" or "evalmap". Writes <out>/demo-<which>.json.
int cmd_demo(const std::string& which, const RunConfig& cfg, std::ostream& out);

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

json l1_demo_report(const RunConfig& cfg);
json evalmap_demo_report(const RunConfig& cfg);

}  // namespace sepenv::cli
