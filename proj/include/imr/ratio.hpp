#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "imr/errors.hpp"

namespace imr {

/// Exact non-negative rational. Thresholds like sup and confidence cutoffs
/// are kept exact so ceilings such as ceil(sup * n) never suffer from
/// floating point drift (0.2 * 5 must be exactly 1).
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Ratio() = default;

    Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (d <= 0 || n < 0)
            throw Error("ratio: must be non-negative with positive denominator");
        std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    /// Accepts "0.2", "1", ".5" or "p/q".
    static Ratio parse(const std::string& text);

    bool zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    /// ceil(num * x / den), exact.
    std::uint64_t ceil_mul(std::uint64_t x) const {
        if (num == 0)
            return 0;
        unsigned __int128 p = static_cast<unsigned __int128>(num) * x;
        return static_cast<std::uint64_t>((p + den - 1) / static_cast<unsigned __int128>(den));
    }

    /// lhs <= (num/den) * rhs, exact.
    bool scaled_geq(std::uint64_t rhs, std::uint64_t lhs) const {
        return static_cast<unsigned __int128>(lhs) * den <=
               static_cast<unsigned __int128>(num) * rhs;
    }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }

    /// a <= b as rationals.
    friend bool leq(const Ratio& a, const Ratio& b) {
        return static_cast<unsigned __int128>(a.num) * b.den <=
               static_cast<unsigned __int128>(b.num) * a.den;
    }
};

inline Ratio Ratio::parse(const std::string& text) {
    if (text.empty())
        throw ParseError("ratio: empty string");
    auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            std::size_t p1 = 0, p2 = 0;
            std::int64_t n = std::stoll(text.substr(0, slash), &p1);
            std::int64_t d = std::stoll(text.substr(slash + 1), &p2);
            if (p1 != slash || p2 != text.size() - slash - 1)
                throw ParseError("ratio: trailing characters in '" + text + "'");
            return Ratio(n, d);
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) {
            std::size_t p = 0;
            std::int64_t n = std::stoll(text, &p);
            if (p != text.size())
                throw ParseError("ratio: trailing characters in '" + text + "'");
            return Ratio(n, 1);
        }
        std::string ip = text.substr(0, dot);
        std::string fp = text.substr(dot + 1);
        if (fp.size() > 18)
            throw ParseError("ratio: too many fractional digits in '" + text + "'");
        std::int64_t whole = 0;
        if (!ip.empty()) {
            std::size_t p = 0;
            whole = std::stoll(ip, &p);
            if (p != ip.size())
                throw ParseError("ratio: bad integer part in '" + text + "'");
        }
        std::int64_t den = 1;
        std::int64_t frac = 0;
        for (char c : fp) {
            if (c < '0' || c > '9')
                throw ParseError("ratio: bad fractional part in '" + text + "'");
            frac = frac * 10 + (c - '0');
            den *= 10;
        }
        return Ratio(whole * den + frac, den);
    } catch (const std::invalid_argument&) {
        throw ParseError("ratio: cannot parse '" + text + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("ratio: out of range '" + text + "'");
    }
}

} // namespace imr
