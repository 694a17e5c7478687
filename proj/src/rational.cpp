#include "dtreason/rational.hpp"

#include <cctype>

#include "dtreason/error.hpp"

namespace dtr {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rat::Rat(long num, long den) {
  if (den == 0) throw Error(ErrorKind::Domain, "zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

bool Rat::try_parse(std::string_view text, Rat& out) {
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  mpq_class value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto n = s.substr(0, slash);
    auto d = s.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d)) return false;
    mpz_class den(std::string(d), 10);
    if (den == 0) return false;
    value = mpq_class(mpz_class(std::string(n), 10), den);
    value.canonicalize();
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if (!all_digits(whole) || !all_digits(frac)) return false;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class n(std::string(whole) + std::string(frac), 10);
    value = mpq_class(n, scale);
    value.canonicalize();
  } else {
    if (!all_digits(s)) return false;
    value = mpq_class(mpz_class(std::string(s), 10));
  }
  if (negative) value = -value;
  out = Rat(std::move(value));
  return true;
}

Rat Rat::parse(std::string_view text) {
  Rat r;
  if (!try_parse(text, r)) {
    throw Error(ErrorKind::Parse, "invalid rational literal '" + std::string(text) + "'");
  }
  return r;
}

std::string Rat::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rat Rat::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return Rat(mpq_class(q));
}

Rat Rat::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return Rat(mpq_class(q));
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw Error(ErrorKind::Domain, "division by zero");
  v_ /= o.v_;
  return *this;
}

Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace dtr
