#pragma once

#include <cstdint>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab {

/// Smallest-prime-factor table for 1..limit. Built once, then read-only and
/// safe to share between scan workers.
class SmallestFactorSieve {
public:
    explicit SmallestFactorSieve(std::uint64_t limit);

    std::uint64_t limit() const noexcept { return limit_; }

    /// Requires 1 <= n <= limit().
    Factorization factor(std::uint64_t n) const;
    std::uint64_t sigma(std::uint64_t n) const;

    /// Sieve lookup when n fits, budgeted factoring otherwise.
    Factorization factor_any(const Integer& n, BudgetMeter& meter) const;

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
};

}  // namespace sigma_lab
