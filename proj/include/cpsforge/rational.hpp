#pragma once

#include "cpsforge/error.hpp"

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace cpsforge {

// Exact rational with 64-bit parts. Intermediates go through __int128 and any
// result that does not fit back into int64 raises Overflow.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }
    [[nodiscard]] bool is_zero() const { return num_ == 0; }
    [[nodiscard]] bool is_one() const { return num_ == 1 && den_ == 1; }
    [[nodiscard]] bool is_integer() const { return den_ == 1; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return from128(-static_cast<__int128>(num_), den_); }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        if (a.den_ == b.den_) return from128(static_cast<__int128>(a.num_) + b.num_, a.den_);
        const __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
        const __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        return from128(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0) throw Error(ErrorCode::DivisionByZero, "rational division by zero");
        return from128(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    // Integer power; negative exponents invert.
    [[nodiscard]] Rational pow(int e) const
    {
        Rational base = e < 0 ? Rational(1) / *this : *this;
        Rational out(1);
        for (int k = 0; k < (e < 0 ? -e : e); ++k) out *= base;
        return out;
    }

    [[nodiscard]] std::string str() const
    {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    static __int128 gcd128(__int128 a, __int128 b)
    {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from128(__int128 n, __int128 d)
    {
        if (d == 0) throw Error(ErrorCode::DivisionByZero, "rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr __int128 lo = INT64_MIN;
        constexpr __int128 hi = INT64_MAX;
        if (n < lo || n > hi || d > hi) throw Error(ErrorCode::Overflow, "rational coefficient overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    void assign(std::int64_t n, std::int64_t d) { *this = from128(n, d); }
};

} // namespace cpsforge
