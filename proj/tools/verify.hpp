#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab::cli {

enum class Verdict { Pass, Fail, Finding, Unresolved };
std::string_view to_string(Verdict v);

struct ClaimResult {
    std::string id;
    std::string statement;  // the claim as stated
    std::string check;      // what was run
    Verdict verdict = Verdict::Unresolved;
    std::string detail;
};

struct VerifyOptions {
    Budget budget;
    unsigned jobs = 1;
    FactorSource* cache = nullptr;
    std::optional<std::string> only;  // claim id filter

    std::uint64_t divisibility_to = 400;
    std::uint32_t divisibility_horizon = 300;
    std::uint64_t multiperfect_limit = 1'000'000;
    std::uint32_t first_failure_horizon = 10;
};

/// Claim ids in report order.
const std::vector<std::string_view>& claim_ids();

/// Runs the selected claims in report order. Throws std::invalid_argument for
/// an unknown claim id.
std::vector<ClaimResult> verify_all(const VerifyOptions& options);

/// 1 if any claim failed, else 2 if any is unresolved, else 0.
int verify_exit_code(const std::vector<ClaimResult>& results);

}  // namespace sigma_lab::cli
