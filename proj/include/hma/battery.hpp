#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

// The verification battery: one row per identity check, grouped into suites.
// The acceptance suite runs the eleven top-level criteria at their stated
// tolerances; the thematic suites (transforms / operators / valuations /
// decomposition) run subsets.
//
// Rows whose pinned reference value is inconsistent with the library's
// internally cross-checked computation are still asserted literally and
// reported as failures, with companion consistency rows that localize the
// disagreement to the constant in question (see the README).

namespace hma {

struct CheckRow {
    std::string check_id;
    std::string anchor;  // audit tag naming the identity being exercised
    int n = 0, k = 0, q = 0;
    double value = 0.0;
    double reference = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

struct BatteryOptions {
    std::uint64_t seed = 20240809ull;
    double tolerance_scale = 1.0;
    bool quick = false;              // reduced corpus sizes
    bool inject_sign_error = false;  // harness self-test fixture
};

// suite: transforms | operators | valuations | decomposition | acceptance | all
std::vector<CheckRow> run_suite(const std::string& suite, const BatteryOptions& opts);

std::string battery_csv(const std::vector<CheckRow>& rows);
nlohmann::json battery_json(const std::vector<CheckRow>& rows);

}  // namespace hma
