#include "igr/scalar.hpp"

#include <cctype>

namespace igr {

Rational::Rational(long num, long den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ValidationError("empty rational literal");
  if (s.front() == '+') s.erase(0, 1);
  const auto slash = s.find('/');
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  if (slash == std::string::npos) {
    if (!valid_int(s)) throw ValidationError("malformed rational literal '" + std::string(text) + "'");
    return Rational(mpq_class(mpz_class(s)));
  }
  const std::string num = s.substr(0, slash);
  const std::string den = s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-')
    throw ValidationError("malformed rational literal '" + std::string(text) + "'");
  mpz_class d(den);
  if (d == 0) throw ValidationError("rational with zero denominator");
  return Rational(mpq_class(mpz_class(num), d));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw NumericalError("rational division by zero");
  v_ /= o.v_;
  return *this;
}

bool Rational::is_perfect_square(Rational* root) const {
  if (sign() < 0) return false;
  const mpz_class& n = v_.get_num();
  const mpz_class& d = v_.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  if (root) {
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    *root = Rational(mpq_class(rn, rd));
  }
  return true;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace igr
