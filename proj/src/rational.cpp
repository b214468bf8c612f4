#include "coactiv/rational.hpp"

#include <cctype>

namespace coactiv {

std::string rational_to_string(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double rational_to_double(const Rational& r) {
    return r.convert_to<double>();
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

std::optional<Rational> parse_unsigned(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string n = s.substr(0, slash), d = s.substr(slash + 1);
        if (!all_digits(n) || !all_digits(d)) return std::nullopt;
        BigInt den(d);
        if (den == 0) return std::nullopt;
        return Rational(BigInt(n), den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || !all_digits(fp)) return std::nullopt;
        BigInt scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        return Rational(BigInt(ip) * scale + BigInt(fp), scale);
    }
    if (!all_digits(s)) return std::nullopt;
    return Rational(BigInt(s));
}

}  // namespace

std::optional<Rational> rational_from_string(const std::string& text) {
    if (text.empty()) return std::nullopt;
    bool neg = false;
    std::size_t start = 0;
    if (text[0] == '-' || text[0] == '+') {
        neg = text[0] == '-';
        start = 1;
    }
    auto r = parse_unsigned(text.substr(start));
    if (!r) return std::nullopt;
    return neg ? Rational(-*r) : *r;
}

}  // namespace coactiv
