#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxlab {

/// Exact rational scalar. mpq_class keeps values in lowest terms with a
/// positive denominator after every arithmetic operation.
using Rational = mpq_class;

/// Parses "7", "-3/4", "0.25", "1e-3", "2.5E+2". Decimal notation is converted
/// exactly (0.1 is 1/10, not the nearest double). Throws InvalidInput.
Rational parse_rational(std::string_view text);

/// "num/den", or "num" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// Exact value of a finite double (every binary64 value is a dyadic rational).
Rational from_double_exact(double x);

/// floor(x * 10^digits) / 10^digits for a nonnegative square root, i.e. sqrt(x)
/// truncated to `digits` decimals.
Rational sqrt_truncated(const Rational& x, unsigned digits);

bool all_nonnegative(std::span<const Rational> v);
Rational sum(std::span<const Rational> v);

/// Lexicographic three-way comparison of equally sized rational vectors.
int compare_lex(std::span<const Rational> a, std::span<const Rational> b);

std::vector<double> to_doubles(std::span<const Rational> v);

}  // namespace ctxlab
