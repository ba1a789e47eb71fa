#include "ctxlab/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw InvalidInput("not a rational number: '" + std::string(text) + "'");
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!is_digits(exp_part) || exp_part.size() > 6) bad_number(text);
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) bad_number(text);
  if (!int_part.empty() && !is_digits(int_part)) bad_number(text);
  if (!frac_part.empty() && !is_digits(frac_part)) bad_number(text);

  mpz_class digits(std::string(int_part) + std::string(frac_part), 10);
  exponent -= static_cast<long>(frac_part.size());
  Rational q;
  if (exponent >= 0) {
    q = Rational(digits * pow10(static_cast<unsigned long>(exponent)));
  } else {
    q = Rational(digits, pow10(static_cast<unsigned long>(-exponent)));
    q.canonicalize();
  }
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_number(text);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!is_digits(num_digits) || !is_digits(den)) bad_number(text);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
    mpz_class n(std::string(num_digits), 10);
    if (!num.empty() && num.front() == '-') n = -n;
    Rational q(n, d);
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& q) { return q.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

Rational from_double_exact(double x) {
  if (!std::isfinite(x)) throw InvalidInput("non-finite floating-point value");
  Rational q(x);  // mpq_set_d is exact
  return q;
}

Rational sqrt_truncated(const Rational& x, unsigned digits) {
  if (sgn(x) < 0) throw InvalidInput("square root of a negative number");
  mpz_class scale = pow10(digits);
  // floor(sqrt(x) * 10^d) = floor(sqrt(x * 10^(2d)))
  mpz_class scaled = mpz_class(x.get_num() * scale * scale / x.get_den());
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  Rational q(root, scale);
  q.canonicalize();
  return q;
}

bool all_nonnegative(std::span<const Rational> v) {
  for (const auto& x : v) {
    if (sgn(x) < 0) return false;
  }
  return true;
}

Rational sum(std::span<const Rational> v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

int compare_lex(std::span<const Rational> a, std::span<const Rational> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

}  // namespace ctxlab
