#pragma once
// Deterministic generators shared by the property tests and the acceptance run.

#include <cstdint>
#include <random>
#include <vector>

#include "clarkesat/interval.hpp"
#include "clarkesat/rational.hpp"

namespace testsupport {

using clarkesat::Interval;
using clarkesat::Rational;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
    }
    bool coin() { return integer(0, 1) == 1; }

    // Uniform-ish rational strictly inside (lo, hi) with denominator <= max_den * den(width).
    Rational inside(const Rational& lo, const Rational& hi, std::int64_t max_den = 1 << 20) {
        const std::int64_t q = integer(2, max_den);
        const std::int64_t p = integer(1, q - 1);
        return lo + (hi - lo) * Rational(p, q);
    }
    Rational unit(std::int64_t max_den = 1 << 20) { return inside(Rational(0), Rational(1), max_den); }

    Interval interval_in(const Rational& lo, const Rational& hi, std::int64_t max_den = 64) {
        Rational a = inside(lo, hi, max_den);
        Rational b = inside(lo, hi, max_den);
        while (a == b)
            b = inside(lo, hi, max_den);
        if (b < a)
            std::swap(a, b);
        const int shape = static_cast<int>(integer(0, 3));
        return Interval(a, b, shape & 1, shape & 2);
    }

    std::vector<Rational> point(unsigned d, const Rational& lo, const Rational& hi) {
        std::vector<Rational> x;
        for (unsigned i = 0; i < d; ++i)
            x.push_back(inside(lo, hi));
        return x;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace testsupport
