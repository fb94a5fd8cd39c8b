#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sigma_lab/arith.hpp"

namespace sigma_lab {

enum class TraceStatus { Complete, BudgetExhausted, DigitLimit };
std::string_view to_string(TraceStatus status);

struct TraceEntry {
    std::uint32_t k = 0;
    Integer value;
    std::optional<Factorization> factorization;  // absent above the storage cap
    Integer residue;                             // value mod start
};

struct SigmaTrace {
    Integer start;
    std::vector<TraceEntry> entries;
    TraceStatus status = TraceStatus::Complete;
};

struct TraceOptions {
    /// Factorizations of entries with more digits than this are not stored.
    std::size_t store_factorization_digits = 120;
    /// Stop after the first entry (k >= 1) for which this returns true.
    std::function<bool(const TraceEntry&)> stop_when;
};

/// sigma^0(n) .. sigma^k_max(n), one budget shared by the whole trace.
/// Budget and digit-limit failures end the trace and are recorded in status.
SigmaTrace iterate_sigma(const Integer& n, std::uint32_t k_max, const Budget& budget = {},
                         FactorSource* cache = nullptr, const TraceOptions& options = {});

enum class AliquotStatus { ReachedZero, Cycle, BudgetExhausted, DigitLimit, Horizon };
std::string_view to_string(AliquotStatus status);

struct AliquotTrace {
    Integer start;
    std::vector<TraceEntry> entries;
    AliquotStatus status = AliquotStatus::Horizon;
    std::uint32_t cycle_length = 0;  // set when status == Cycle
};

struct AliquotOptions {
    std::size_t store_factorization_digits = 120;
    /// Maximum number of distinct values remembered for cycle detection.
    std::size_t visited_cap = 10'000;
};

AliquotTrace iterate_aliquot(const Integer& n, std::uint32_t k_max, const Budget& budget = {},
                             FactorSource* cache = nullptr, const AliquotOptions& options = {});

struct GcdSequence {
    std::vector<Integer> values;  // g_0 .. g_K
    TraceStatus status = TraceStatus::Complete;
};

/// g_0 = n, g_{i+1} = gcd(g_i, sigma^{i+1}(n)).
GcdSequence gcd_sequence(const Integer& n, std::uint32_t k_max, const Budget& budget = {},
                         FactorSource* cache = nullptr);
GcdSequence gcd_sequence(const SigmaTrace& trace);

struct RatioSequence {
    std::vector<ExactRatio> values;  // r_0 .. r_{K-1}
    TraceStatus status = TraceStatus::Complete;
};

/// r_i = sigma^{i+1}(n) / sigma^i(n), which is the abundancy of sigma^i(n).
RatioSequence ratio_sequence(const Integer& n, std::uint32_t k_max, const Budget& budget = {},
                             FactorSource* cache = nullptr);

bool is_square_or_twice_square(const Integer& v);

/// First k whose trace value is a square or twice a square.
std::optional<std::uint32_t> square_probe(const SigmaTrace& trace);

struct LenstraResult {
    std::uint32_t k = 0;
    std::uint64_t m_max = 0;
    std::optional<std::uint64_t> m;
    std::vector<Integer> chain;  // s^0(m) .. s^k(m) for the found m
};

/// Smallest m <= m_max with m < s(m) < s^2(m) < ... < s^k(m).
LenstraResult lenstra_chain_search(std::uint32_t k, std::uint64_t m_max, unsigned jobs = 1);

/// True when s^0(m) < s^1(m) < ... < s^k(m), computed by plain factoring.
bool is_increasing_aliquot_chain(const Integer& m, std::uint32_t k);

struct ErdosReport {
    std::uint32_t k = 0;
    ExactRatio delta;
    std::uint64_t m_lo = 0;
    std::uint64_t m_hi = 0;
    std::uint64_t applicable = 0;
    std::uint64_t inapplicable = 0;  // chain reached 0 or 1 before step k
    std::vector<std::uint64_t> violations_by_step;  // index i-1 holds step i
    std::uint64_t violating = 0;                    // m violating at some step
    std::vector<std::uint64_t> violating_sample;    // ascending, capped

    double violation_fraction() const {
        return applicable == 0 ? 0.0 : static_cast<double>(violating) / static_cast<double>(applicable);
    }
};

/// Counts m in [m_lo, m_hi] for which some 1 <= i <= k breaks
/// (1-delta) m (s(m)/m)^i < s^i(m) < (1+delta) m (s(m)/m)^i.
ErdosReport erdos_sampler(std::uint32_t k, const ExactRatio& delta, std::uint64_t m_lo,
                          std::uint64_t m_hi, unsigned jobs = 1, std::size_t sample_cap = 50);

struct AbundancyProductCheck {
    ExactRatio lhs;  // S(S(n) n)
    ExactRatio rhs;  // S(n) S(S(n))
    bool holds = false;
};

/// Compares the abundancy of S(n)*n against S(n)*S(S(n)) for multiperfect n > 1.
AbundancyProductCheck abundancy_product_check(const Integer& n, const Budget& budget = {});

}  // namespace sigma_lab
