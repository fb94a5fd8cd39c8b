#pragma once

// Brute-force reference implementations. These deliberately avoid the library's
// factorization path: everything is computed from divisor enumeration.

#include <cstdint>
#include <vector>

namespace oracle {

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        out.push_back(d);
        if (d != n / d) out.push_back(n / d);
    }
    return out;
}

inline std::uint64_t sigma(std::uint64_t n) {
    std::uint64_t s = 0;
    for (const auto d : divisors(n)) s += d;
    return s;
}

inline unsigned __int128 sigma_pow(std::uint64_t n, unsigned k) {
    unsigned __int128 s = 0;
    for (const auto d : divisors(n)) {
        unsigned __int128 term = 1;
        for (unsigned i = 0; i < k; ++i) term *= d;
        s += term;
    }
    return s;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline std::uint64_t aliquot(std::uint64_t n) { return sigma(n) - n; }

inline std::vector<std::uint64_t> multiperfect_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> sums(limit + 1, 0);
    for (std::uint64_t d = 1; d <= limit; ++d) {
        for (std::uint64_t m = d; m <= limit; m += d) sums[m] += d;
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; n <= limit; ++n) {
        if (sums[n] % n == 0) out.push_back(n);
    }
    return out;
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
        const auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace oracle
