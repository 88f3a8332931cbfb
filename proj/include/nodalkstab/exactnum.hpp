#ifndef NODALKSTAB_EXACTNUM_HPP
#define NODALKSTAB_EXACTNUM_HPP

// Exact number systems: arbitrary-precision rationals (GMP-backed), the
// quadratic extension Q(sqrt5), and truncated univariate power series.
// No floating point is used anywhere in these types; doubles appear only
// in presentation layers (SVG plotting), never in comparisons.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nks {

using ZZ = mpz_class;
using QQ = mpq_class;

enum class Ordering { less, equal, greater };

// --- rational text syntax -------------------------------------------------
//
// Rationals are written `p` or `p/q` (q > 0, lowest terms, no whitespace).
// Quadratic values are written `p/q+r/s*sqrt5` or `p/q-r/s*sqrt5`.

QQ qq_from_string(const std::string& text);
std::string qq_to_string(const QQ& x);

// Decimal rendering with `digits` fractional digits, exact (value truncated
// toward minus infinity at the last digit). Presentation only.
std::string qq_to_decimal(const QQ& x, int digits);

long qq_sign(const QQ& x);
ZZ qq_floor(const QQ& x);

// --- Q(sqrt5) -------------------------------------------------------------

// p + q*sqrt(5) in canonical (p,q) form; equals a rational iff q == 0.
// Equality is structural (the representation is unique).
struct Quad {
  QQ p;
  QQ q;

  Quad() : p(0), q(0) {}
  Quad(const QQ& rational) : p(rational), q(0) {}  // NOLINT(google-explicit-constructor)
  Quad(QQ p_, QQ q_) : p(std::move(p_)), q(std::move(q_)) {}
  Quad(long n) : p(n), q(0) {}  // NOLINT(google-explicit-constructor)

  static Quad sqrt5() { return Quad(QQ(0), QQ(1)); }

  bool is_rational() const { return q == 0; }

  Quad operator-() const { return Quad(-p, -q); }
  Quad operator+(const Quad& o) const { return Quad(p + o.p, q + o.q); }
  Quad operator-(const Quad& o) const { return Quad(p - o.p, q - o.q); }
  Quad operator*(const Quad& o) const {
    return Quad(p * o.p + 5 * q * o.q, p * o.q + q * o.p);
  }
  Quad operator/(const Quad& o) const;

  bool operator==(const Quad& o) const { return p == o.p && q == o.q; }
  bool operator!=(const Quad& o) const { return !(*this == o); }
};

// Sign of p + q*sqrt5, decided by sign cases plus one integer cross-squaring;
// never by floating point.
int quad_sign(const Quad& x);

Ordering quad_cmp(const Quad& x, const Quad& y);

inline bool quad_less(const Quad& x, const Quad& y) {
  return quad_cmp(x, y) == Ordering::less;
}
inline bool quad_leq(const Quad& x, const Quad& y) {
  return quad_cmp(x, y) != Ordering::greater;
}

Quad quad_from_string(const std::string& text);
std::string quad_to_string(const Quad& x);
std::string quad_to_decimal(const Quad& x, int digits);

// floor(x * scale) as an exact integer (scale > 0).
ZZ quad_floor_scaled(const Quad& x, const ZZ& scale);

// --- truncated univariate power series ------------------------------------

// Power series over QQ truncated at an explicit order N: coefficients of
// x^0..x^N are exact, everything beyond is dropped. The truncation order is
// a parameter on every operation; there is no global default.
class UniSeries {
 public:
  explicit UniSeries(int trunc_order);
  UniSeries(std::vector<QQ> coeffs, int trunc_order);

  int trunc_order() const { return trunc_; }
  const QQ& coeff(int k) const;
  void set_coeff(int k, const QQ& value);

  bool is_zero() const;
  // Largest k with nonzero coefficient, -1 for the zero series.
  int top_degree() const;

  UniSeries add(const UniSeries& o) const;
  UniSeries sub(const UniSeries& o) const;
  UniSeries mul(const UniSeries& o) const;
  UniSeries scale(const QQ& c) const;
  // this(inner); requires inner(0) == 0.
  UniSeries compose(const UniSeries& inner) const;
  UniSeries derivative() const;
  UniSeries truncate(int new_order) const;

  static UniSeries identity(int trunc_order);  // the series x
  static UniSeries constant(const QQ& c, int trunc_order);

  bool operator==(const UniSeries& o) const;

 private:
  int trunc_;
  std::vector<QQ> c_;  // size trunc_ + 1
};

// Expansion of (1+x)^alpha to order N; coefficient k is the generalized
// binomial coefficient C(alpha, k).
UniSeries binomial_series(const QQ& alpha, int N);

// Compositional inverse g of f modulo x^{N+1}: requires f(0) == 0 and
// nonzero linear coefficient. The result is verified internally by
// composing back to the identity; failure throws std::logic_error.
UniSeries invert_series(const UniSeries& f, int N);

}  // namespace nks

#endif  // NODALKSTAB_EXACTNUM_HPP
