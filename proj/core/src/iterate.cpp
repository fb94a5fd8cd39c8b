#include "sigma_lab/iterate.hpp"

#include <algorithm>
#include <unordered_map>

#include "sigma_lab/parallel.hpp"
#include "sigma_lab/sieve.hpp"

namespace sigma_lab {

namespace {

struct IntegerHash {
    std::size_t operator()(const Integer& v) const noexcept {
        return mpz_size(v.get_mpz_t()) == 0 ? 0 : mpz_getlimbn(v.get_mpz_t(), 0);
    }
};

TraceEntry make_entry(std::uint32_t k, const Integer& value, const Integer& start,
                      const Factorization* f, std::size_t store_digits) {
    TraceEntry entry;
    entry.k = k;
    entry.value = value;
    entry.residue = value % start;
    if (f != nullptr && decimal_digits(value) <= store_digits) entry.factorization = *f;
    return entry;
}

// Sieve reach for aliquot scans: chain values beyond it fall back to factoring.
std::uint64_t scan_sieve_limit(std::uint64_t m_hi) {
    return std::min<std::uint64_t>(std::max<std::uint64_t>(m_hi, 1) * 8, 200'000'000);
}

Integer aliquot_of(const Integer& v, const SmallestFactorSieve& sieve, BudgetMeter& meter) {
    if (v.fits_ulong_p() && v.get_ui() <= sieve.limit())
        return Integer(static_cast<unsigned long>(sieve.sigma(v.get_ui()) - v.get_ui()));
    return aliquot(sieve.factor_any(v, meter));
}

}  // namespace

std::string_view to_string(TraceStatus status) {
    switch (status) {
        case TraceStatus::Complete: return "COMPLETE";
        case TraceStatus::BudgetExhausted: return "BUDGET_EXHAUSTED";
        case TraceStatus::DigitLimit: return "DIGIT_LIMIT";
    }
    return "?";
}

std::string_view to_string(AliquotStatus status) {
    switch (status) {
        case AliquotStatus::ReachedZero: return "REACHED_ZERO";
        case AliquotStatus::Cycle: return "CYCLE";
        case AliquotStatus::BudgetExhausted: return "BUDGET_EXHAUSTED";
        case AliquotStatus::DigitLimit: return "DIGIT_LIMIT";
        case AliquotStatus::Horizon: return "HORIZON";
    }
    return "?";
}

SigmaTrace iterate_sigma(const Integer& n, std::uint32_t k_max, const Budget& budget,
                         FactorSource* cache, const TraceOptions& options) {
    if (n < 1) throw std::invalid_argument("iterate_sigma requires n >= 1");
    SigmaTrace trace;
    trace.start = n;
    BudgetMeter meter(budget);

    std::optional<Factorization> current;
    try {
        current = factor(n, meter, cache);
    } catch (const BudgetExhausted&) {
        trace.status = TraceStatus::BudgetExhausted;
    } catch (const DigitLimit&) {
        trace.status = TraceStatus::DigitLimit;
    }
    trace.entries.push_back(
        make_entry(0, n, n, current ? &*current : nullptr, options.store_factorization_digits));
    if (!current) return trace;

    for (std::uint32_t k = 1; k <= k_max; ++k) {
        const Integer next_value = sigma(*current);
        std::optional<Factorization> next;
        try {
            meter.require_digits(next_value);
            next = sigma_factorization(*current, meter, cache);
        } catch (const BudgetExhausted&) {
            trace.status = TraceStatus::BudgetExhausted;
        } catch (const DigitLimit&) {
            trace.status = TraceStatus::DigitLimit;
        }
        trace.entries.push_back(make_entry(k, next_value, n, next ? &*next : nullptr,
                                           options.store_factorization_digits));
        if (options.stop_when && options.stop_when(trace.entries.back())) break;
        if (!next) break;
        current = std::move(next);
    }
    return trace;
}

AliquotTrace iterate_aliquot(const Integer& n, std::uint32_t k_max, const Budget& budget,
                             FactorSource* cache, const AliquotOptions& options) {
    if (n < 1) throw std::invalid_argument("iterate_aliquot requires n >= 1");
    AliquotTrace trace;
    trace.start = n;
    BudgetMeter meter(budget);
    std::unordered_map<Integer, std::uint32_t, IntegerHash> first_seen;

    Integer value = n;
    for (std::uint32_t k = 0;; ++k) {
        if (value == 0) {
            trace.entries.push_back(make_entry(k, value, n, nullptr, 0));
            trace.status = AliquotStatus::ReachedZero;
            return trace;
        }
        if (auto it = first_seen.find(value); it != first_seen.end()) {
            trace.entries.push_back(make_entry(k, value, n, nullptr, 0));
            trace.status = AliquotStatus::Cycle;
            trace.cycle_length = k - it->second;
            return trace;
        }
        if (first_seen.size() >= options.visited_cap) {
            trace.status = AliquotStatus::Horizon;
            return trace;
        }
        first_seen.emplace(value, k);

        std::optional<Factorization> f;
        if (k < k_max) {
            try {
                f = factor(value, meter, cache);
            } catch (const BudgetExhausted&) {
                trace.status = AliquotStatus::BudgetExhausted;
            } catch (const DigitLimit&) {
                trace.status = AliquotStatus::DigitLimit;
            }
        }
        trace.entries.push_back(
            make_entry(k, value, n, f ? &*f : nullptr, options.store_factorization_digits));
        if (k >= k_max) {
            trace.status = AliquotStatus::Horizon;
            return trace;
        }
        if (!f) return trace;
        value = aliquot(*f);
    }
}

GcdSequence gcd_sequence(const SigmaTrace& trace) {
    GcdSequence out;
    out.status = trace.status;
    for (const auto& entry : trace.entries) {
        if (out.values.empty()) {
            out.values.push_back(entry.value);
        } else {
            Integer g;
            mpz_gcd(g.get_mpz_t(), out.values.back().get_mpz_t(), entry.value.get_mpz_t());
            out.values.push_back(std::move(g));
        }
    }
    return out;
}

GcdSequence gcd_sequence(const Integer& n, std::uint32_t k_max, const Budget& budget,
                         FactorSource* cache) {
    return gcd_sequence(iterate_sigma(n, k_max, budget, cache));
}

RatioSequence ratio_sequence(const Integer& n, std::uint32_t k_max, const Budget& budget,
                             FactorSource* cache) {
    if (n < 2) throw PreconditionViolated("ratio_sequence requires n >= 2");
    const SigmaTrace trace = iterate_sigma(n, k_max, budget, cache);
    RatioSequence out;
    out.status = trace.status;
    for (std::size_t i = 0; i + 1 < trace.entries.size(); ++i)
        out.values.emplace_back(trace.entries[i + 1].value, trace.entries[i].value);
    return out;
}

bool is_square_or_twice_square(const Integer& v) {
    if (v < 1) return false;
    if (is_square(v)) return true;
    return mpz_even_p(v.get_mpz_t()) && is_square(Integer(v / 2));
}

std::optional<std::uint32_t> square_probe(const SigmaTrace& trace) {
    if (trace.entries.empty()) throw PreconditionViolated("square_probe needs a nonempty trace");
    for (const auto& entry : trace.entries) {
        if (is_square_or_twice_square(entry.value)) return entry.k;
    }
    return std::nullopt;
}

bool is_increasing_aliquot_chain(const Integer& m, std::uint32_t k) {
    Integer previous = m;
    for (std::uint32_t i = 0; i < k; ++i) {
        if (previous < 1) return false;
        const Integer next = aliquot(factor(previous));
        if (next <= previous) return false;
        previous = next;
    }
    return true;
}

LenstraResult lenstra_chain_search(std::uint32_t k, std::uint64_t m_max, unsigned jobs) {
    if (k < 1) throw PreconditionViolated("lenstra_chain_search requires k >= 1");
    LenstraResult result;
    result.k = k;
    result.m_max = m_max;
    if (m_max < 2) return result;

    const SmallestFactorSieve sieve(scan_sieve_limit(m_max));
    // Scan in blocks so the search stops shortly after the first hit.
    const std::uint64_t block = 1 << 14;
    for (std::uint64_t lo = 2; lo <= m_max && !result.m; lo += block) {
        const std::uint64_t hi = std::min(m_max, lo + block - 1);
        const auto hits = parallel_map_range(lo, hi, jobs, [&](std::uint64_t m) -> std::uint8_t {
            BudgetMeter meter(Budget{});
            Integer previous(static_cast<unsigned long>(m));
            for (std::uint32_t i = 0; i < k; ++i) {
                const Integer next = aliquot_of(previous, sieve, meter);
                if (next <= previous) return 0;
                previous = next;
            }
            return 1;
        });
        if (auto it = std::find(hits.begin(), hits.end(), 1); it != hits.end())
            result.m = lo + static_cast<std::uint64_t>(it - hits.begin());
    }
    if (result.m) {
        Integer v(static_cast<unsigned long>(*result.m));
        result.chain.push_back(v);
        for (std::uint32_t i = 0; i < k; ++i) {
            v = aliquot(factor(v));
            result.chain.push_back(v);
        }
    }
    return result;
}

ErdosReport erdos_sampler(std::uint32_t k, const ExactRatio& delta, std::uint64_t m_lo,
                          std::uint64_t m_hi, unsigned jobs, std::size_t sample_cap) {
    if (k < 1) throw PreconditionViolated("erdos_sampler requires k >= 1");
    if (m_lo < 2 || m_hi < m_lo) throw PreconditionViolated("erdos_sampler requires 2 <= m_lo <= m_hi");
    if (delta <= ExactRatio(Integer(0)) || delta >= ExactRatio(Integer(1)))
        throw PreconditionViolated("delta must lie strictly between 0 and 1");

    ErdosReport report;
    report.k = k;
    report.delta = delta;
    report.m_lo = m_lo;
    report.m_hi = m_hi;
    report.violations_by_step.assign(k, 0);

    const SmallestFactorSieve sieve(scan_sieve_limit(m_hi));
    const mpq_class below = 1 - delta.as_mpq();
    const mpq_class above = 1 + delta.as_mpq();

    // Per m: bit i-1 set when step i is violated; bit 63 marks inapplicable.
    constexpr std::uint64_t kInapplicable = std::uint64_t{1} << 63;
    const auto outcomes = parallel_map_range(m_lo, m_hi, jobs, [&](std::uint64_t m) -> std::uint64_t {
        BudgetMeter meter(Budget{});
        const Integer mz(static_cast<unsigned long>(m));
        std::vector<Integer> chain{mz};
        for (std::uint32_t i = 1; i <= k; ++i) {
            if (i > 1 && chain.back() <= 1) return kInapplicable;
            chain.push_back(aliquot_of(chain.back(), sieve, meter));
        }
        std::uint64_t mask = 0;
        mpq_class ratio(chain[1], mz);
        ratio.canonicalize();
        mpq_class growth = mz;
        for (std::uint32_t i = 1; i <= k; ++i) {
            growth *= ratio;
            const mpq_class value(chain[i]);
            if (!(below * growth < value && value < above * growth)) mask |= std::uint64_t{1} << (i - 1);
        }
        return mask;
    });

    for (std::uint64_t idx = 0; idx < outcomes.size(); ++idx) {
        const std::uint64_t mask = outcomes[idx];
        if (mask & kInapplicable) {
            ++report.inapplicable;
            continue;
        }
        ++report.applicable;
        if (mask == 0) continue;
        ++report.violating;
        if (report.violating_sample.size() < sample_cap) report.violating_sample.push_back(m_lo + idx);
        for (std::uint32_t i = 0; i < k; ++i) {
            if (mask & (std::uint64_t{1} << i)) ++report.violations_by_step[i];
        }
    }
    return report;
}

AbundancyProductCheck abundancy_product_check(const Integer& n, const Budget& budget) {
    if (n < 2) throw NotMultiperfect("n must exceed 1");
    BudgetMeter meter(budget);
    const Factorization f = factor(n, meter);
    const ExactRatio s = abundancy(f);
    if (!s.is_integer()) throw NotMultiperfect(n.get_str() + " is not multiperfect");
    const Integer index = s.numerator();
    AbundancyProductCheck out;
    out.lhs = abundancy(factor(Integer(index * n), meter));
    out.rhs = s * abundancy(factor(index, meter));
    out.holds = out.lhs < out.rhs;
    return out;
}

}  // namespace sigma_lab
