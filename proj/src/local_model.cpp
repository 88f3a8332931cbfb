#include "nodalkstab/local_model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace nks {

// --- Form --------------------------------------------------------------------

QQ Form::coeff(const Exp3& e) const {
  auto it = coeffs_.find(e);
  return it == coeffs_.end() ? QQ(0) : it->second;
}

void Form::add_term(const Exp3& e, const QQ& c) {
  if (c == 0) return;
  if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[0] + e[1] + e[2] != degree_) {
    throw std::invalid_argument("Form::add_term: exponent degree mismatch");
  }
  auto it = coeffs_.find(e);
  if (it == coeffs_.end()) {
    coeffs_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

Form Form::add(const Form& o) const {
  if (degree_ != o.degree_ && !is_zero() && !o.is_zero()) {
    throw std::invalid_argument("Form::add: degree mismatch");
  }
  Form r = *this;
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
  return r;
}

Form Form::sub(const Form& o) const { return add(o.scale(QQ(-1))); }

Form Form::mul(const Form& o) const {
  Form r(degree_ + o.degree_);
  for (const auto& [e1, c1] : coeffs_) {
    for (const auto& [e2, c2] : o.coeffs_) {
      r.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    }
  }
  return r;
}

Form Form::scale(const QQ& c) const {
  Form r(degree_);
  if (c == 0) return r;
  for (const auto& [e, cc] : coeffs_) r.coeffs_.emplace(e, cc * c);
  return r;
}

Form Form::sigma() const {
  Form r(degree_);
  for (const auto& [e, c] : coeffs_) {
    r.coeffs_.emplace(e, (e[2] % 2 == 0) ? c : QQ(-c));
  }
  return r;
}

Form Form::monomial(int e0, int e1, int e2, const QQ& c) {
  Form r(e0 + e1 + e2);
  r.add_term({e0, e1, e2}, c);
  return r;
}

Form Form::nodal_cubic() {
  Form c(3);
  c.add_term({1, 0, 2}, QQ(1));
  c.add_term({0, 3, 0}, QQ(-1));
  c.add_term({1, 2, 0}, QQ(-1));
  return c;
}

std::string Form::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << qq_to_string(c) << "*x0^" << e[0] << "*x1^" << e[1] << "*x2^" << e[2];
  }
  return os.str();
}

namespace {

// Single-divisor multivariate division: returns the quotient when g divides s
// exactly, nullopt otherwise. Leading terms taken in the map's (lex) order.
std::optional<Form> exact_divide(const Form& s, const Form& g) {
  if (g.is_zero()) throw std::invalid_argument("division by zero form");
  if (s.is_zero()) return Form(std::max(0, s.degree() - g.degree()));
  if (s.degree() < g.degree()) return std::nullopt;
  const auto& gl = *g.terms().rbegin();  // leading term of g
  Form rem = s;
  Form quot(s.degree() - g.degree());
  while (!rem.is_zero()) {
    const auto& rl = *rem.terms().rbegin();
    Exp3 diff{rl.first[0] - gl.first[0], rl.first[1] - gl.first[1],
              rl.first[2] - gl.first[2]};
    if (diff[0] < 0 || diff[1] < 0 || diff[2] < 0) return std::nullopt;
    QQ factor = rl.second / gl.second;
    quot.add_term(diff, factor);
    Form piece = Form::monomial(diff[0], diff[1], diff[2], factor);
    rem = rem.sub(piece.mul(g));
  }
  return quot;
}

}  // namespace

int divisor_multiplicity(const Form& g, const Form& s) {
  if (s.is_zero()) throw std::invalid_argument("divisor_multiplicity: zero section");
  if (g.is_zero() || g.degree() == 0) {
    throw std::invalid_argument("divisor_multiplicity: divisor must have positive degree");
  }
  int k = 0;
  Form cur = s;
  while (true) {
    auto q = exact_divide(cur, g);
    if (!q) return k;
    cur = *q;
    ++k;
    if (cur.degree() == 0) {
      // constants are not divisible by a positive-degree form
      if (g.degree() > 0) return k;
    }
  }
}

// --- BiSeries ------------------------------------------------------------------

QQ BiSeries::coeff(const Mono2& m) const {
  auto it = c_.find(m);
  return it == c_.end() ? QQ(0) : it->second;
}

void BiSeries::add_term(const Mono2& m, const QQ& c) {
  if (c == 0) return;
  if (m.i < 0 || m.j < 0) throw std::invalid_argument("negative exponent");
  if (m.i + m.j > trunc_) return;  // beyond truncation window
  auto it = c_.find(m);
  if (it == c_.end()) {
    c_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) c_.erase(it);
  }
}

std::string BiSeries::dump() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [m, c] : c_) {
    if (!first) os << ",";
    first = false;
    os << "\"" << m.i << "," << m.j << "\":\"" << qq_to_string(c) << "\"";
  }
  os << "}";
  return os.str();
}

// --- MonomialValuation -----------------------------------------------------------

MonomialValuation::MonomialValuation(long a_, long b_) : a(a_), b(b_) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("weights must be positive");
  if (std::gcd(a, b) != 1) throw std::invalid_argument("weights must be coprime");
}

int DeepenPolicy::initial(int degree, const MonomialValuation& v) const {
  long ratio = (v.b + v.a - 1) / v.a;  // ceil(b/a)
  long n0 = 2L * std::max(1, degree) * std::max(1L, ratio);
  return static_cast<int>(std::min<long>(n0, hard_cap));
}

// --- NodalCubicModel ---------------------------------------------------------------

UniSeries NodalCubicModel::branch_phi(int N) const {
  // x * (1+x)^{1/2}
  UniSeries half = binomial_series(QQ(1, 2), N);
  UniSeries phi(N);
  for (int k = 1; k <= N; ++k) phi.set_coeff(k, half.coeff(k - 1));
  return phi;
}

UniSeries NodalCubicModel::branch_psi(int N) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = psi_cache_.find(N);
    if (it != psi_cache_.end()) return it->second;
  }
  UniSeries psi = invert_series(branch_phi(N), N);
  std::lock_guard<std::mutex> lock(mu_);
  return psi_cache_.emplace(N, std::move(psi)).first->second;
}

BiSeries NodalCubicModel::localize(const Form& s, int N) const {
  if (s.is_zero()) throw std::invalid_argument("localize: zero form");
  const int D = s.degree();
  // Affine coordinates at o: x = psi(u), y = v with u = (w-z)/2, v = (z+w)/2.
  // Write s/x0^D = sum_g y^g * P_g(x) and compose each P_g with psi, giving
  // a polynomial in v with univariate series in u as coefficients; then
  // expand u^k v^g into (z,w).
  UniSeries psi = branch_psi(N);

  std::vector<UniSeries> p_of_x(D + 1, UniSeries(N));
  for (const auto& [e, c] : s.terms()) {
    // x0^{e0} x1^{e1} x2^{e2} / x0^D = x^{e1} y^{e2}
    if (e[1] <= N) {
      p_of_x[e[2]].set_coeff(e[1], p_of_x[e[2]].coeff(e[1]) + c);
    }
  }

  // Binomial table up to N.
  const int maxn = N + 1;
  std::vector<std::vector<ZZ>> binom(maxn + 1);
  for (int n = 0; n <= maxn; ++n) {
    binom[n].resize(n + 1);
    binom[n][0] = 1;
    for (int k = 1; k <= n; ++k) {
      binom[n][k] = binom[n - 1][k - 1];
      if (k < n) binom[n][k] += binom[n - 1][k];
    }
  }

  BiSeries out(N);
  QQ term;
  for (int g = 0; g <= D; ++g) {
    if (p_of_x[g].is_zero()) continue;
    UniSeries q = p_of_x[g].compose(psi);  // series in u
    for (int k = 0; k <= N - g; ++k) {
      const QQ& qk = q.coeff(k);
      if (qk == 0) continue;
      // u^k v^g = 2^{-k-g} (w-z)^k (z+w)^g
      QQ base = qk / QQ(ZZ(1) << (k + g));
      for (int r = 0; r <= k; ++r) {
        // (w-z)^k: C(k,r) w^r (-z)^{k-r}
        QQ cr = base * QQ(binom[k][r]);
        if ((k - r) % 2 == 1) cr = -cr;
        for (int sgm = 0; sgm <= g; ++sgm) {
          // (z+w)^g: C(g,s) z^s w^{g-s}
          term = cr * QQ(binom[g][sgm]);
          out.add_term({(k - r) + sgm, r + (g - sgm)}, term);
        }
      }
    }
  }
  return out;
}

// --- vweight -------------------------------------------------------------------

namespace {

// Minimum weighted-degree support point; ties broken by larger z-exponent.
std::optional<Mono2> min_support(const BiSeries& f, const MonomialValuation& v,
                                 long* weight_out) {
  std::optional<Mono2> best;
  long best_w = 0;
  for (const auto& [m, c] : f.support()) {
    long w = v.weight(m);
    if (!best || w < best_w || (w == best_w && m.i > best->i)) {
      best = m;
      best_w = w;
    }
  }
  if (best && weight_out) *weight_out = best_w;
  return best;
}

}  // namespace

VWeight vweight(const NodalCubicModel& model, const MonomialValuation& v,
                const Form& s, const DeepenPolicy& policy) {
  if (s.is_zero()) {
    throw std::domain_error("vweight: zero section has infinite value");
  }
  int N = policy.initial(s.degree(), v);
  while (true) {
    BiSeries loc = model.localize(s, N);
    long w = 0;
    auto m = min_support(loc, v, &w);
    // Any discarded term has total degree >= N+1, hence weighted degree
    // >= min(a,b)*(N+1); a found minimum below that bound is certified.
    if (m && w < v.min_weight() * static_cast<long>(N + 1)) {
      QQ vt(w, v.a);
      vt.canonicalize();
      return VWeight{w, vt, *m, N};
    }
    if (N >= policy.hard_cap) {
      throw TruncationExhausted(
          "vweight: truncation cap " + std::to_string(policy.hard_cap) +
          " reached for weights (" + std::to_string(v.a) + "," +
          std::to_string(v.b) + ")");
    }
    N = std::min(2 * N, policy.hard_cap);
  }
}

ZZ colength(const MonomialValuation& v, const ZZ& p) {
  if (p <= 0) return ZZ(0);
  // Row-wise: for each j with b*j < p there are ceil((p - b*j)/a) values of i.
  ZZ total = 0;
  for (ZZ j = 0; j * v.b < p; ++j) {
    ZZ rem = p - j * v.b;
    ZZ row;
    mpz_cdiv_q_ui(row.get_mpz_t(), rem.get_mpz_t(), static_cast<unsigned long>(v.a));
    total += row;
  }
  return total;
}

// --- Newton polygon ----------------------------------------------------------

std::vector<Mono2> newton_polygon(const BiSeries& series) {
  if (series.is_zero()) return {};
  // Pareto-minimal support points, then the lower-left convex chain.
  // Minimal j for each i:
  std::map<int, int> min_j;
  for (const auto& [m, c] : series.support()) {
    auto it = min_j.find(m.i);
    if (it == min_j.end() || m.j < it->second) min_j[m.i] = m.j;
  }
  std::vector<Mono2> pts;
  int best_j = INT32_MAX;
  for (auto it = min_j.begin(); it != min_j.end(); ++it) {
    if (it->second < best_j) {
      pts.push_back({it->first, it->second});
      best_j = it->second;
    }
  }
  // pts is sorted by i ascending with strictly decreasing j. Lower convex
  // hull by cross products (keep right turns).
  std::vector<Mono2> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const Mono2& a = hull[hull.size() - 2];
      const Mono2& b = hull[hull.size() - 1];
      long cross = static_cast<long>(b.i - a.i) * (pt.j - a.j) -
                   static_cast<long>(b.j - a.j) * (pt.i - a.i);
      if (cross <= 0) {
        hull.pop_back();  // b is above or on the segment a-pt
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  // List from the (i,0)-side vertex toward the (0,j)-side vertex.
  std::reverse(hull.begin(), hull.end());
  return hull;
}

}  // namespace nks
