// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace housebot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfrastructure = 3;

/// Entry point for the `housebot` tool: run, validate, replay, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace housebot
