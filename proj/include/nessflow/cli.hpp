// Copyright 2026 The nessflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cli.hpp: The nessflow command-line tool.
//
// Commands: stationary, sweep, spectrum, cone, bounds, evolve, reproduce-paper.
// Global flags: --config PATH, --out PATH, --json, --seed N, --kB VALUE.
// Exit codes: 0 success, 1 usage or configuration error, 2 a numerical
// check failed.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace nessflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCheckFailed = 2;

struct ReproductionCheck {
    std::string name;
    double expected{0.0};
    double computed{0.0};
    double rel_tol{0.0};
    bool upper_limit{false}; ///< pass iff computed < expected (tolerance unused)
    bool pass{false};
};

struct Reproduction {
    double kB_eV_per_K{0.0};
    bool convention_mismatch{false};
    std::vector<ReproductionCheck> checks;

    bool all_pass() const;
};

/// The headline numbers for the built-in typical scenario.
Reproduction reproduce(double kB_eV_per_K, std::uint64_t seed, std::size_t cap_samples = 10000);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nessflow
