#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace impartial {

/// Raised when an input breaks a documented contract (bad ground size,
/// class mismatch, invalid weight, ...).
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an exact enumeration would exceed its budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t narrow128(__int128 v, const char* what) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw std::overflow_error(std::string("rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

inline __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

/// Exact rational number: all score and probability arithmetic goes through
/// this type so that tie-breaking and impartiality checks are equality-grade.
/// Stored in lowest terms with positive denominator. Intermediate products
/// use 128-bit integers; results that do not fit 64 bits throw
/// std::overflow_error rather than wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from128(n, d, "+");
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from128(n, d, "-");
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(static_cast<__int128>(a.num_) * b.num_,
                       static_cast<__int128>(a.den_) * b.den_, "*");
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw contract_error("rational division by zero");
        return from128(static_cast<__int128>(a.num_) * b.den_,
                       static_cast<__int128>(a.den_) * b.num_, "/");
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    // Lowest-terms storage makes equality a plain field comparison.
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "num/den", e.g. "-3/4"; integers render as "5/1".
    std::string str() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Parses "num/den" or a bare integer "num". Trailing characters are
    /// rejected.
    static Rational parse(const std::string& text) {
        auto integer = [&text](const std::string& part) {
            std::size_t used = 0;
            std::int64_t v;
            try {
                v = std::stoll(part, &used);
            } catch (const std::invalid_argument&) {
                throw contract_error("malformed rational literal '" + text + "'");
            } catch (const std::out_of_range&) {
                throw contract_error("rational literal out of range '" + text + "'");
            }
            if (used != part.size())
                throw contract_error("malformed rational literal '" + text + "'");
            return v;
        };
        if (text.empty()) throw contract_error("empty rational literal");
        std::size_t slash = text.find('/');
        if (slash == std::string::npos) return Rational(integer(text));
        return Rational(integer(text.substr(0, slash)), integer(text.substr(slash + 1)));
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    static Rational from128(__int128 n, __int128 d, const char* what) {
        if (d == 0) throw contract_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = detail::gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = detail::narrow128(n, what);
        r.den_ = detail::narrow128(d, what);
        return r;
    }

    void assign(std::int64_t num, std::int64_t den) {
        Rational r = from128(num, den, "init");
        num_ = r.num_;
        den_ = r.den_;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace impartial
