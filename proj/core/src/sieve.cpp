#include "sigma_lab/sieve.hpp"

#include <stdexcept>

namespace sigma_lab {

SmallestFactorSieve::SmallestFactorSieve(std::uint64_t limit) : limit_(limit), spf_(limit + 1, 0) {
    if (limit > 0xffffffffULL) throw std::invalid_argument("sieve limit too large");
    for (std::uint64_t i = 2; i <= limit_; ++i) {
        if (spf_[i] != 0) continue;
        spf_[i] = static_cast<std::uint32_t>(i);
        for (std::uint64_t j = i * i; j <= limit_; j += i) {
            if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
        }
    }
}

Factorization SmallestFactorSieve::factor(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw std::out_of_range("value outside sieve range");
    std::vector<PrimePower> parts;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        parts.push_back(PrimePower{Integer(static_cast<unsigned long>(p)), e});
    }
    return Factorization::from_certified(std::move(parts));
}

std::uint64_t SmallestFactorSieve::sigma(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw std::out_of_range("value outside sieve range");
    std::uint64_t out = 1;
    while (n > 1) {
        const std::uint64_t p = spf_[n];
        std::uint64_t term = 1, power = 1;
        while (n % p == 0) {
            n /= p;
            power *= p;
            term += power;
        }
        out *= term;
    }
    return out;
}

Factorization SmallestFactorSieve::factor_any(const Integer& n, BudgetMeter& meter) const {
    if (n >= 1 && n.fits_ulong_p() && n.get_ui() <= limit_) return factor(n.get_ui());
    return sigma_lab::factor(n, meter);
}

}  // namespace sigma_lab
