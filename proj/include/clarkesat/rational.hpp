#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace clarkesat {

/// Exact rational number in canonical form (gcd(num, den) = 1, den > 0).
///
/// Thin value type over GMP's mpq_class. Text form is always "p/q", including
/// integers ("3/1") and zero ("0/1"), so that serialized output is
/// decimal-free and unambiguous.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n); // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);
    explicit Rational(mpq_class q);

    /// Parses "p/q" or an integer "p". Throws ParseError on anything else
    /// (including decimals and a zero denominator).
    static Rational parse(std::string_view text);

    /// 2^e for any integer e.
    static Rational pow2(long e);

    const mpq_class& raw() const { return value_; }
    mpz_class num() const { return value_.get_num(); }
    mpz_class den() const { return value_.get_den(); }

    int sign() const { return sgn(value_); }
    bool is_zero() const { return sign() == 0; }

    Rational abs() const;
    mpz_class floor() const;
    double to_double() const { return value_.get_d(); }

    std::string str() const;
    /// 15-significant-digit decimal rendering; approximate, for display only.
    std::string decimal() const;

    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
               : c > 0 ? std::strong_ordering::greater
                       : std::strong_ordering::equal;
    }

private:
    mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace clarkesat
