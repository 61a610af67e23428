#include "clarkesat/rational.hpp"

#include <cctype>
#include <cstdio>
#include <ostream>

#include "clarkesat/errors.hpp"

namespace clarkesat {

namespace {

bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+'))
        s.remove_prefix(1);
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

mpz_class parse_integer(std::string_view s) {
    if (!is_integer_literal(s))
        throw ParseError("not an integer: '" + std::string(s) + "'");
    if (s.front() == '+')
        s.remove_prefix(1);
    return mpz_class(std::string(s), 10);
}

} // namespace

Rational::Rational(std::int64_t n) : value_(mpz_class(static_cast<long>(n))) {}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0)
        throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(mpz_class(static_cast<long>(n)), mpz_class(static_cast<long>(d)));
    value_.canonicalize();
}

Rational::Rational(mpq_class q) : value_(std::move(q)) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(mpq_class(parse_integer(text)));
    const mpz_class n = parse_integer(text.substr(0, slash));
    const std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && (den_text.front() == '-' || den_text.front() == '+'))
        throw ParseError("signed denominator in '" + std::string(text) + "'");
    const mpz_class d = parse_integer(den_text);
    if (d == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(mpq_class(n, d));
}

Rational Rational::pow2(long e) {
    mpz_class p = 1;
    if (e >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        return Rational(mpq_class(p));
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return Rational(mpq_class(mpz_class(1), p));
}

Rational Rational::abs() const {
    Rational r;
    r.value_ = ::abs(value_);
    return r;
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
    return q;
}

std::string Rational::str() const {
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::string Rational::decimal() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", to_double());
    return buf;
}

Rational& Rational::operator+=(const Rational& o) { value_ += o.value_; return *this; }
Rational& Rational::operator-=(const Rational& o) { value_ -= o.value_; return *this; }
Rational& Rational::operator*=(const Rational& o) { value_ *= o.value_; return *this; }

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero())
        throw std::domain_error("rational division by zero");
    value_ /= o.value_;
    return *this;
}

Rational Rational::operator-() const {
    Rational r;
    r.value_ = -value_;
    return r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

} // namespace clarkesat
