#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace coactiv {

// Exact rational arithmetic. Transition probabilities and reachability
// values are kept exact end to end; doubles appear only in iterative
// solvers and NN code.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

// Canonical text form: "n" when the denominator is 1, else "n/d" reduced.
std::string rational_to_string(const Rational& r);

double rational_to_double(const Rational& r);

// Accepts "3", "-3", "1/2" and decimal literals such as "0.25" (converted
// exactly, e.g. 25/100 -> 1/4). Returns nullopt on malformed input.
std::optional<Rational> rational_from_string(const std::string& text);

}  // namespace coactiv
