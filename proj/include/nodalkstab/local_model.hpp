#ifndef NODALKSTAB_LOCAL_MODEL_HPP
#define NODALKSTAB_LOCAL_MODEL_HPP

// Analytic local model of the nodal cubic C = x0*x2^2 - x1^3 - x0*x1^2 at its
// node o = [1:0:0]. In the affine chart (x,y) = (x1/x0, x2/x0) the curve is
// y^2 = x^2 (1+x); the two branches are y = +-phi(x) with
// phi(x) = x*(1+x)^{1/2}, and the branch coordinates are fixed once and for
// all as z = y - phi(x), w = y + phi(x). In these coordinates the local
// equation of C is exactly z*w, and the automorphism x2 -> -x2 acts as the
// swap (z,w) -> (-w,-z).

#include <array>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "nodalkstab/exactnum.hpp"

namespace nks {

// Raised when iterative deepening hits the configured truncation cap without
// producing a certified answer. Never a wrong number: always a loud error.
class TruncationExhausted : public std::runtime_error {
 public:
  explicit TruncationExhausted(const std::string& what) : std::runtime_error(what) {}
};

// --- homogeneous forms in x0, x1, x2 ----------------------------------------

using Exp3 = std::array<int, 3>;

// Homogeneous polynomial in x0,x1,x2 with exact rational coefficients.
class Form {
 public:
  Form() : degree_(0) {}
  explicit Form(int degree) : degree_(degree) {}

  int degree() const { return degree_; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::map<Exp3, QQ>& terms() const { return coeffs_; }

  QQ coeff(const Exp3& e) const;
  void add_term(const Exp3& e, const QQ& c);

  Form add(const Form& o) const;
  Form sub(const Form& o) const;
  Form mul(const Form& o) const;
  Form scale(const QQ& c) const;
  // x2 -> -x2 (the involution interchanging the two branches of C).
  Form sigma() const;

  static Form monomial(int e0, int e1, int e2, const QQ& c = QQ(1));
  // The fixed nodal cubic x0*x2^2 - x1^3 - x0*x1^2.
  static Form nodal_cubic();

  bool operator==(const Form& o) const {
    return degree_ == o.degree_ && coeffs_ == o.coeffs_;
  }

  std::string to_string() const;

 private:
  int degree_;
  std::map<Exp3, QQ> coeffs_;  // exponents -> nonzero coefficient
};

// Exact divisibility multiplicity: largest k with g^k dividing s (s != 0).
int divisor_multiplicity(const Form& g, const Form& s);

// --- bivariate series in the branch coordinates -----------------------------

struct Mono2 {
  int i;  // z-exponent
  int j;  // w-exponent
  bool operator==(const Mono2& o) const { return i == o.i && j == o.j; }
  bool operator<(const Mono2& o) const {
    return i != o.i ? i < o.i : j < o.j;
  }
};

// Truncated expansion in (z,w): all stored exponents satisfy i+j <= trunc.
class BiSeries {
 public:
  explicit BiSeries(int trunc) : trunc_(trunc) {}

  int trunc() const { return trunc_; }
  const std::map<Mono2, QQ>& support() const { return c_; }
  bool is_zero() const { return c_.empty(); }

  QQ coeff(const Mono2& m) const;
  void add_term(const Mono2& m, const QQ& c);

  // JSON-ish dump for debugging: {"i,j": "p/q", ...} rendered as text.
  std::string dump() const;

 private:
  int trunc_;
  std::map<Mono2, QQ> c_;
};

// --- monomial valuations ----------------------------------------------------

// v_{(a,b)}: weights a on z and b on w, gcd(a,b) = 1. As a function on forms
// it is the integer weighted order; the normalized valuation is v_t = ord/a
// with slope t = b/a.
struct MonomialValuation {
  long a;
  long b;

  MonomialValuation(long a_, long b_);
  QQ slope() const { return QQ(b, a); }
  MonomialValuation swapped() const { return MonomialValuation(b, a); }
  long weight(const Mono2& m) const { return a * m.i + b * m.j; }
  long min_weight() const { return std::min(a, b); }
};

// Deepening policy for the iterative localization truncation. The initial
// order for a degree-D form is 2*D*max(1, ceil(b/a)), doubled until the
// order certificate holds, capped loudly.
struct DeepenPolicy {
  int hard_cap = 512;
  int initial(int degree, const MonomialValuation& v) const;
};

struct VWeight {
  long ord;        // integer weighted order (ord_E scale)
  QQ v_t;          // ord / a
  Mono2 initial;   // attaining support point (weighted order, then larger i)
  int truncation;  // truncation at which the certificate held
};

class NodalCubicModel {
 public:
  NodalCubicModel() = default;

  // phi(x) = x*(1+x)^{1/2} to order N.
  UniSeries branch_phi(int N) const;
  // psi = compositional inverse of phi (memoized per truncation).
  UniSeries branch_psi(int N) const;

  // Expansion of s/x0^deg(s) at o in (z,w), exact modulo total degree N+1.
  // Requires s != 0.
  BiSeries localize(const Form& s, int N) const;

 private:
  mutable std::mutex mu_;
  mutable std::map<int, UniSeries> psi_cache_;
};

// Certified weighted order of s under v: deepens the truncation until a
// support point of weighted degree < min(a,b)*(N+1) exists, so no discarded
// term can beat the reported minimum. s == 0 is rejected (infinite value).
VWeight vweight(const NodalCubicModel& model, const MonomialValuation& v,
                const Form& s, const DeepenPolicy& policy = {});

// #{(i,j) in Z_{>=0}^2 : a*i + b*j < p}, by row-wise closed form.
ZZ colength(const MonomialValuation& v, const ZZ& p);

// Lower-left Newton polygon vertices of a localized series, listed from the
// (i,0) end toward the (0,j) end (descending i). Computed on the stored
// (truncated) support.
std::vector<Mono2> newton_polygon(const BiSeries& series);

}  // namespace nks

#endif  // NODALKSTAB_LOCAL_MODEL_HPP
