#include "nodalkstab/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nks {

namespace {

bool is_plain_integer(const std::string& s) {
  if (s.empty()) return false;
  size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (k == s.size()) return false;
  for (; k < s.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  }
  return true;
}

}  // namespace

QQ qq_from_string(const std::string& text) {
  auto slash = text.find('/');
  std::string num = (slash == std::string::npos) ? text : text.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "1" : text.substr(slash + 1);
  if (!is_plain_integer(num) || !is_plain_integer(den) || den[0] == '-') {
    throw std::invalid_argument("bad rational literal: '" + text + "'");
  }
  ZZ n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  QQ r(n, d);
  r.canonicalize();
  return r;
}

std::string qq_to_string(const QQ& x) {
  std::ostringstream os;
  os << x.get_num();
  if (x.get_den() != 1) os << '/' << x.get_den();
  return os.str();
}

long qq_sign(const QQ& x) { return sgn(x); }

ZZ qq_floor(const QQ& x) {
  ZZ q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

namespace {

ZZ pow10(int k) {
  ZZ r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

std::string scaled_to_decimal(const ZZ& scaled, int digits) {
  ZZ v = scaled;
  bool neg = v < 0;
  if (neg) v = -v;
  std::string s = v.get_str();
  if (static_cast<int>(s.size()) <= digits) {
    s = std::string(digits + 1 - s.size(), '0') + s;
  }
  std::string out = s.substr(0, s.size() - digits);
  if (digits > 0) out += "." + s.substr(s.size() - digits);
  if (neg) out = "-" + out;
  return out;
}

}  // namespace

std::string qq_to_decimal(const QQ& x, int digits) {
  ZZ scaled = qq_floor(QQ(x * pow10(digits)));
  return scaled_to_decimal(scaled, digits);
}

// --- Quad -------------------------------------------------------------------

int quad_sign(const Quad& x) {
  int sp = static_cast<int>(sgn(x.p));
  int sq = static_cast<int>(sgn(x.q));
  if (sq == 0) return sp;
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  // Opposite signs: compare p^2 against 5 q^2; the larger magnitude wins.
  QQ lhs = x.p * x.p;
  QQ rhs = 5 * x.q * x.q;
  int c = cmp(lhs, rhs);
  if (c == 0) {
    // p^2 == 5 q^2 with p,q nonzero would make sqrt5 rational.
    throw std::logic_error("quad_sign: impossible tie p^2 == 5q^2");
  }
  return c > 0 ? sp : sq;
}

Ordering quad_cmp(const Quad& x, const Quad& y) {
  int s = quad_sign(Quad(x.p - y.p, x.q - y.q));
  if (s < 0) return Ordering::less;
  if (s > 0) return Ordering::greater;
  return Ordering::equal;
}

Quad Quad::operator/(const Quad& o) const {
  // 1/(p + q sqrt5) = (p - q sqrt5)/(p^2 - 5 q^2)
  QQ norm = o.p * o.p - 5 * o.q * o.q;
  if (quad_sign(o) == 0) throw std::domain_error("division by zero Quad");
  if (norm == 0) throw std::logic_error("Quad norm vanished on nonzero value");
  Quad inv(o.p / norm, -o.q / norm);
  return *this * inv;
}

Quad quad_from_string(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number literal");
  if (text.find("sqrt5") == std::string::npos) {
    return Quad(qq_from_string(text));
  }
  // Split at the first '+' or '-' past position 0 (numerator signs only occur
  // at the start of each rational component).
  size_t sep = std::string::npos;
  for (size_t k = 1; k < text.size(); ++k) {
    if (text[k] == '+' || text[k] == '-') {
      sep = k;
      break;
    }
  }
  std::string rational_part, surd_part;
  int surd_sign = 1;
  if (sep == std::string::npos) {
    rational_part = "0";
    surd_part = text;
  } else {
    rational_part = text.substr(0, sep);
    surd_sign = (text[sep] == '-') ? -1 : 1;
    surd_part = text.substr(sep + 1);
  }
  auto star = surd_part.find("*sqrt5");
  if (star == std::string::npos || star + 6 != surd_part.size()) {
    if (surd_part == "sqrt5") {
      return Quad(qq_from_string(rational_part), QQ(surd_sign));
    }
    throw std::invalid_argument("bad quadratic literal: '" + text + "'");
  }
  QQ q = qq_from_string(surd_part.substr(0, star));
  if (surd_sign < 0) q = -q;
  return Quad(qq_from_string(rational_part), q);
}

std::string quad_to_string(const Quad& x) {
  if (x.q == 0) return qq_to_string(x.p);
  std::string out = qq_to_string(x.p);
  if (x.q < 0) {
    out += "-" + qq_to_string(QQ(-x.q)) + "*sqrt5";
  } else {
    out += "+" + qq_to_string(x.q) + "*sqrt5";
  }
  return out;
}

ZZ quad_floor_scaled(const Quad& x, const ZZ& scale) {
  if (scale <= 0) throw std::invalid_argument("scale must be positive");
  Quad v = x * Quad(QQ(scale));
  if (v.q == 0) return qq_floor(v.p);
  // Bracket floor(v) with an exact integer binary search on quad_sign.
  // sqrt5 < 9/4, so |v| <= |p| + (9/4)|q| gives a safe initial radius.
  QQ bound = abs(v.p) + QQ(9, 4) * abs(v.q);
  ZZ hi = qq_floor(bound) + 2;  // v < hi
  ZZ lo = -hi;                  // lo <= v
  while (hi - lo > 1) {
    ZZ mid = (lo + hi);
    mpz_fdiv_q_2exp(mid.get_mpz_t(), mid.get_mpz_t(), 1);
    // mid <= v ?
    if (quad_sign(v - Quad(QQ(mid))) >= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::string quad_to_decimal(const Quad& x, int digits) {
  if (x.q == 0) return qq_to_decimal(x.p, digits);
  ZZ scaled = quad_floor_scaled(x, pow10(digits));
  return scaled_to_decimal(scaled, digits);
}

// --- UniSeries ----------------------------------------------------------------

UniSeries::UniSeries(int trunc_order) : trunc_(trunc_order) {
  if (trunc_order < 0) throw std::invalid_argument("negative truncation order");
  c_.assign(trunc_ + 1, QQ(0));
}

UniSeries::UniSeries(std::vector<QQ> coeffs, int trunc_order) : trunc_(trunc_order) {
  if (trunc_order < 0) throw std::invalid_argument("negative truncation order");
  coeffs.resize(trunc_ + 1, QQ(0));
  c_ = std::move(coeffs);
}

const QQ& UniSeries::coeff(int k) const {
  static const QQ zero(0);
  if (k < 0) throw std::out_of_range("negative series index");
  if (k > trunc_) return zero;
  return c_[k];
}

void UniSeries::set_coeff(int k, const QQ& value) {
  if (k < 0 || k > trunc_) throw std::out_of_range("series index beyond truncation");
  c_[k] = value;
}

bool UniSeries::is_zero() const { return top_degree() < 0; }

int UniSeries::top_degree() const {
  for (int k = trunc_; k >= 0; --k) {
    if (c_[k] != 0) return k;
  }
  return -1;
}

UniSeries UniSeries::add(const UniSeries& o) const {
  int n = std::min(trunc_, o.trunc_);
  UniSeries r(n);
  for (int k = 0; k <= n; ++k) r.c_[k] = c_[k] + o.c_[k];
  return r;
}

UniSeries UniSeries::sub(const UniSeries& o) const {
  int n = std::min(trunc_, o.trunc_);
  UniSeries r(n);
  for (int k = 0; k <= n; ++k) r.c_[k] = c_[k] - o.c_[k];
  return r;
}

UniSeries UniSeries::mul(const UniSeries& o) const {
  int n = std::min(trunc_, o.trunc_);
  UniSeries r(n);
  QQ t;
  for (int i = 0; i <= n; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; i + j <= n; ++j) {
      if (o.c_[j] == 0) continue;
      t = c_[i] * o.c_[j];
      r.c_[i + j] += t;
    }
  }
  return r;
}

UniSeries UniSeries::scale(const QQ& s) const {
  UniSeries r(trunc_);
  for (int k = 0; k <= trunc_; ++k) r.c_[k] = c_[k] * s;
  return r;
}

UniSeries UniSeries::compose(const UniSeries& inner) const {
  if (inner.coeff(0) != 0) {
    throw std::invalid_argument("compose requires inner(0) == 0");
  }
  int n = std::min(trunc_, inner.trunc_);
  // Horner evaluation from the top coefficient down.
  UniSeries acc(n);
  for (int k = std::min(trunc_, n); k >= 0; --k) {
    acc = acc.mul(inner);
    acc.c_[0] += c_[k];
  }
  return acc;
}

UniSeries UniSeries::derivative() const {
  if (trunc_ == 0) return UniSeries(0);
  UniSeries r(trunc_ - 1);
  for (int k = 1; k <= trunc_; ++k) r.c_[k - 1] = c_[k] * k;
  return r;
}

UniSeries UniSeries::truncate(int new_order) const {
  UniSeries r(new_order);
  for (int k = 0; k <= std::min(new_order, trunc_); ++k) r.c_[k] = c_[k];
  return r;
}

UniSeries UniSeries::identity(int trunc_order) {
  UniSeries r(trunc_order);
  if (trunc_order >= 1) r.c_[1] = 1;
  return r;
}

UniSeries UniSeries::constant(const QQ& c, int trunc_order) {
  UniSeries r(trunc_order);
  r.c_[0] = c;
  return r;
}

bool UniSeries::operator==(const UniSeries& o) const {
  return trunc_ == o.trunc_ && c_ == o.c_;
}

UniSeries binomial_series(const QQ& alpha, int N) {
  if (N < 0) throw std::invalid_argument("binomial_series: N must be >= 0");
  UniSeries r(N);
  QQ coef(1);
  r.set_coeff(0, coef);
  for (int k = 1; k <= N; ++k) {
    coef *= (alpha - (k - 1));
    coef /= k;
    r.set_coeff(k, coef);
  }
  return r;
}

namespace {

// 1/u for a unit series (u(0) != 0), to the truncation order of u.
UniSeries reciprocal_series(const UniSeries& u) {
  int n = u.trunc_order();
  UniSeries inv(0);
  inv.set_coeff(0, QQ(1) / u.coeff(0));
  int got = 0;
  while (got < n) {
    got = std::min(2 * got + 1, n);
    UniSeries cur = inv.truncate(got);
    UniSeries two = UniSeries::constant(QQ(2), got);
    inv = cur.mul(two.sub(u.truncate(got).mul(cur)));
  }
  return inv;
}

}  // namespace

UniSeries invert_series(const UniSeries& f, int N) {
  if (f.coeff(0) != 0) throw std::invalid_argument("invert_series: f(0) must be 0");
  if (f.coeff(1) == 0) throw std::invalid_argument("invert_series: zero linear coefficient");
  // Newton iteration g <- g - (f(g) - x) / f'(g), doubling the valid order.
  UniSeries g(1);
  g.set_coeff(1, QQ(1) / f.coeff(1));
  int valid = 1;
  while (valid < N) {
    valid = std::min(2 * valid, N);
    UniSeries gk = g.truncate(valid);
    UniSeries err = f.truncate(valid).compose(gk).sub(UniSeries::identity(valid));
    UniSeries deriv = f.truncate(valid).derivative().truncate(valid).compose(gk);
    g = gk.sub(err.mul(reciprocal_series(deriv)));
  }
  g = g.truncate(N);
  // Internal verification: f(g) must be the identity modulo x^{N+1}.
  UniSeries check = f.truncate(N).compose(g);
  if (!(check == UniSeries::identity(N))) {
    throw std::logic_error("invert_series: composition check failed");
  }
  return g;
}

}  // namespace nks
