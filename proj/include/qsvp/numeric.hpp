#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsvp {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

using IntVec = std::vector<BigInt>;
using IntMat = std::vector<IntVec>; // row major
using RatVec = std::vector<BigRat>;
using RatMat = std::vector<RatVec>;

// Extended Euclid, minimal-absolute-remainder variant: returns (g, u, v) with
// u*a + v*b = g = gcd(a,b) >= 0. The minimal-remainder quotients keep the
// coefficients small, which matters for the banding row operations.
struct ExtGcd {
    BigInt g, u, v;
};

inline ExtGcd ext_gcd(BigInt a, BigInt b) {
    BigInt r0 = a, r1 = b;
    BigInt u0 = 1, u1 = 0;
    BigInt v0 = 0, v1 = 1;
    while (r1 != 0) {
        // quotient rounded to nearest, so |r0 - q*r1| <= |r1|/2
        BigInt q = r0 / r1;
        BigInt rem = r0 - q * r1;
        BigInt half = abs(r1) - abs(rem);
        if (abs(rem) > half) {
            q += (r1 > 0) == (rem > 0) ? 1 : -1;
            rem = r0 - q * r1;
        }
        r0 = r1;
        r1 = rem;
        BigInt tu = u0 - q * u1;
        u0 = u1;
        u1 = tu;
        BigInt tv = v0 - q * v1;
        v0 = v1;
        v1 = tv;
    }
    if (r0 < 0) {
        r0 = -r0;
        u0 = -u0;
        v0 = -v0;
    }
    return {r0, u0, v0};
}

// Exact binomial coefficient C(n, k).
inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

// log2 of a positive big integer, accurate to double precision even when the
// value is far beyond the range of double.
inline double log2_bigint(const BigInt& x) {
    if (x <= 0) throw std::domain_error("log2_bigint: nonpositive argument");
    const auto bits = boost::multiprecision::msb(x); // floor(log2 x)
    if (bits <= 52) return std::log2(x.convert_to<double>());
    const unsigned shift = static_cast<unsigned>(bits - 52);
    const double mantissa = BigInt(x >> shift).convert_to<double>();
    return std::log2(mantissa) + static_cast<double>(shift);
}

inline std::int64_t to_int64_checked(const BigInt& x, const char* context) {
    if (x < std::numeric_limits<std::int64_t>::min() || x > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error(std::string(context) + ": value out of int64 range");
    return x.convert_to<std::int64_t>();
}

} // namespace qsvp
