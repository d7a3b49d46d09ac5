#pragma once

// Quantity strings such as "66.4 mNm/A", "0.4 g m^2" or "9.56 uNms^2/rad^2".
//
// Grammar:
//   unit    := product ('/' product)*
//   product := factor ([ *.] factor)*
//   factor  := (run | '(' unit ')') ('^' int)?
// A run of letters like "mNm" can split several ways (mN.m, m.N.m); every
// split is kept and the one matching the expected dimension wins. Radians
// are tracked as their own dimension so that rad/s and Hz stay distinct.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gebench::units {

/// Exponents of kg, m, s, A, rad.
using Dim = std::array<int, 5>;

struct Quantity {
  double factor = 1.0;  ///< to SI
  Dim dim{};
};

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Quantity operator*(const Quantity& a, const Quantity& b) {
  Quantity q{a.factor * b.factor, {}};
  for (std::size_t i = 0; i < 5; ++i) q.dim[i] = a.dim[i] + b.dim[i];
  return q;
}

inline Quantity power(const Quantity& a, int n) {
  Quantity q{std::pow(a.factor, n), {}};
  for (std::size_t i = 0; i < 5; ++i) q.dim[i] = a.dim[i] * n;
  return q;
}

namespace detail {

struct Symbol {
  std::string_view name;
  Quantity q;
};

inline const std::vector<Symbol>& symbols() {
  static const std::vector<Symbol> s = {
      {"g", {1e-3, {1, 0, 0, 0, 0}}},
      {"m", {1.0, {0, 1, 0, 0, 0}}},
      {"s", {1.0, {0, 0, 1, 0, 0}}},
      {"A", {1.0, {0, 0, 0, 1, 0}}},
      {"rad", {1.0, {0, 0, 0, 0, 1}}},
      {"N", {1.0, {1, 1, -2, 0, 0}}},
      {"Hz", {1.0, {0, 0, -1, 0, 0}}},
      {"Ohm", {1.0, {1, 2, -3, -2, 0}}},
      {"ohm", {1.0, {1, 2, -3, -2, 0}}},
      {"H", {1.0, {1, 2, -2, -2, 0}}},
      {"V", {1.0, {1, 2, -3, -1, 0}}},
      {"W", {1.0, {1, 2, -3, 0, 0}}},
      {"J", {1.0, {1, 2, -2, 0, 0}}},
  };
  return s;
}

inline std::optional<double> prefix(std::string_view p) {
  if (p.empty()) return 1.0;
  if (p == "p") return 1e-12;
  if (p == "n") return 1e-9;
  if (p == "u" || p == "\xC2\xB5" || p == "\xCE\xBC") return 1e-6;
  if (p == "m") return 1e-3;
  if (p == "c") return 1e-2;
  if (p == "k") return 1e3;
  if (p == "M") return 1e6;
  if (p == "G") return 1e9;
  return std::nullopt;
}

inline bool same(const Quantity& a, const Quantity& b) {
  return a.dim == b.dim && std::abs(a.factor - b.factor) <= 1e-12 * std::abs(b.factor);
}

inline void push_unique(std::vector<Quantity>& v, const Quantity& q) {
  for (const auto& x : v) {
    if (same(x, q)) return;
  }
  v.push_back(q);
}

/// All readings of a letter run; `last_power` applies to the final symbol.
inline void split_run(std::string_view run, int last_power, Quantity acc,
                      std::vector<Quantity>& out) {
  if (run.empty()) {
    push_unique(out, acc);
    return;
  }
  for (std::size_t plen = 0; plen <= 2 && plen < run.size(); ++plen) {
    const auto pf = prefix(run.substr(0, plen));
    if (!pf) continue;
    for (const auto& sym : symbols()) {
      if (run.substr(plen, sym.name.size()) != sym.name) continue;
      const std::size_t used = plen + sym.name.size();
      Quantity q{*pf * sym.q.factor, sym.q.dim};
      if (used == run.size()) q = power(q, last_power);
      split_run(run.substr(used), last_power, acc * q, out);
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::vector<Quantity> parse() {
    auto r = unit();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw UnitError("unit '" + std::string(s_) + "': " + msg);
  }

  void skip_space() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  static std::vector<Quantity> combine(const std::vector<Quantity>& a,
                                       const std::vector<Quantity>& b, int sign) {
    std::vector<Quantity> out;
    for (const auto& x : a) {
      for (const auto& y : b) push_unique(out, x * power(y, sign));
    }
    return out;
  }

  std::vector<Quantity> unit() {
    auto acc = product();
    for (;;) {
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        acc = combine(acc, product(), -1);
      } else {
        return acc;
      }
    }
  }

  std::vector<Quantity> product() {
    auto acc = factor();
    for (;;) {
      const std::size_t save = pos_;
      skip_space();
      if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '.')) {
        ++pos_;
        skip_space();
      }
      if (pos_ < s_.size() && (starts_run(pos_) || s_[pos_] == '(')) {
        acc = combine(acc, factor(), 1);
      } else {
        pos_ = save;
        return acc;
      }
    }
  }

  bool starts_run(std::size_t i) const {
    const auto c = static_cast<unsigned char>(s_[i]);
    return std::isalpha(c) || c >= 0x80;
  }

  int exponent() {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != '^') return 1;
    ++pos_;
    const std::size_t b = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == b) fail("missing exponent");
    return std::atoi(std::string(s_.substr(b, pos_ - b)).c_str());
  }

  std::vector<Quantity> factor() {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      auto inner = unit();
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
      ++pos_;
      const int e = exponent();
      std::vector<Quantity> out;
      for (const auto& q : inner) push_unique(out, power(q, e));
      return out;
    }
    const std::size_t b = pos_;
    while (pos_ < s_.size() && starts_run(pos_)) ++pos_;
    if (pos_ == b) fail("expected a unit symbol");
    const auto run = s_.substr(b, pos_ - b);
    const int e = exponent();
    std::vector<Quantity> out;
    split_run(run, e, Quantity{}, out);
    if (out.empty()) fail("unknown symbol '" + std::string(run) + "'");
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Every reading of a unit expression; empty text is dimensionless.
inline std::vector<Quantity> parse_unit(std::string_view text) {
  if (text.find_first_not_of(' ') == std::string_view::npos) return {Quantity{}};
  return detail::Parser(text).parse();
}

/// Dimension of a unit expression that must read unambiguously, e.g. "N/(rad/s)^2".
inline Quantity reference_unit(std::string_view text) {
  const auto r = parse_unit(text);
  if (r.size() != 1 || r[0].factor != 1.0) {
    throw UnitError("unit '" + std::string(text) + "' is not a plain SI reference");
  }
  return r[0];
}

/// Parses "<number> [unit]" and converts to the SI unit `expected`. A bare
/// number is taken as already in `expected`.
inline double parse_quantity(std::string_view text, std::string_view expected) {
  const auto want = reference_unit(expected);
  const std::string s(text);
  const char* b = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(b, &end);
  if (end == b) throw UnitError("'" + s + "': expected a number");
  const std::string_view rest(end);
  if (rest.find_first_not_of(' ') == std::string_view::npos) return v;
  std::optional<double> factor;
  for (const auto& q : parse_unit(rest)) {
    if (q.dim != want.dim) continue;
    if (factor && std::abs(*factor - q.factor) > 1e-12 * std::abs(q.factor)) {
      throw UnitError("'" + s + "': ambiguous unit; separate the symbols with spaces");
    }
    factor = q.factor;
  }
  if (!factor) {
    throw UnitError("'" + s + "': unit not compatible with " + std::string(expected));
  }
  return v * *factor;
}

}  // namespace gebench::units
