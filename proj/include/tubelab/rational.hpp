#pragma once
// Exact rationals on 64-bit numerator/denominator pairs. Intermediate products
// use 128-bit integers; any result that does not fit in 64 bits throws.

#include <cstdint>
#include <compare>
#include <string>

namespace tubelab {

using i128 = __int128;

class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_long_double() const {
        return static_cast<long double>(num_) / static_cast<long double>(den_);
    }
    std::string str() const;
    static Rational parse(const std::string& text);

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    bool is_zero() const { return num_ == 0; }
    Rational abs() const { return num_ < 0 ? -*this : *this; }

private:
    static Rational from_wide(i128 n, i128 d);
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Integer power with a non-negative exponent; negative exponents invert.
Rational pow(const Rational& base, int exponent);

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);

}  // namespace tubelab
