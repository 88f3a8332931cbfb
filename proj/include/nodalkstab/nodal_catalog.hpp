#ifndef NODALKSTAB_NODAL_CATALOG_HPP
#define NODALKSTAB_NODAL_CATALOG_HPP

// The catalog of exact data at the node of the nodal cubic: the integer
// sequence d_n, the breakpoint slopes t_n and t'_n, the very singular plane
// curves D_n, the exact piecewise S function, the finite-generation / Fano
// classifier, and the degeneration descriptors.

#include <optional>
#include <string>
#include <vector>

#include "nodalkstab/blowup_geom.hpp"
#include "nodalkstab/local_model.hpp"

namespace nks {

// d_0 = d_1 = 1, d_2 = 2, d_{n+1} = 3 d_n - d_{n-1}. Construction verifies
// the four identities (Markov, shifted product, odd-index Fibonacci, 3
// never divides) up to the requested index.
struct DSequence {
  std::vector<ZZ> d;  // indices 0..N

  const ZZ& at(int n) const { return d.at(static_cast<size_t>(n)); }
  int max_index() const { return static_cast<int>(d.size()) - 1; }
};

DSequence d_sequence(int N);

// t_0 = 1, t_n = d_{n+1}/d_{n-1} for n >= 1; t'_n = d_{n+1}^2/d_n^2 for
// n >= 1 (t'_0 = 1). Strictly interleaved: t_n < t'_n < t_{n+1}, with
// common limit (7+3 sqrt5)/2.
struct Breakpoints {
  std::vector<QQ> t;
  std::vector<QQ> tp;
};

Breakpoints breakpoints(int N);

// (7 +- 3 sqrt5)/2, the endpoints of the open Fano window.
Quad fano_window_upper();
Quad fano_window_lower();

// The very singular degree-d_n curve: all (z,w)-coefficients of weighted
// degree < d_{n-1} d_{n+1} vanish under weights (d_{n-1}, d_{n+1}).
struct SingularCurve {
  int n;
  long degree;
  Form curve;                   // normalized: coefficient 1 at the w^{d_{n-1}} vertex
  long ord;                     // certified weighted order = d_{n-1} d_{n+1}
  std::vector<Mono2> polygon;   // Newton polygon vertices
  long solution_dim;            // dimension of the defining linear system's kernel
  std::string provenance;       // integrality certificate summary
};

// Solves the exact linear system through localize; asserts a nonempty
// solution space, certifies the order through vweight, checks the Newton
// polygon, and certifies integrality (single-branch germ + degree counting).
SingularCurve construct_Dn(const NodalCubicModel& model, int n, int max_n = 4,
                           const DeepenPolicy& policy = {});

// Exact S on all slopes t > 0: the piecewise-linear formula
// d_{n+1}/d_n + (d_n/d_{n+1}) t on [t_n, t_{n+1}], the rational function
// (t^2 + 11t + 1)/(3(t+1)) beyond the window, and t*S(1/t) below t = 1.
Quad S_exact(const Quad& t);

// Normalized log discrepancy A(v_t) = 1 + t.
Quad A_invariant(const Quad& t);

// Degeneration descriptor: either the weighted plane P(1, d_n^2, d_{n+1}^2)
// (interior of a piece) or the weighted hypersurface
// x0*x3 = x1^{d_{n+1}} + x2^{d_{n-1}} in P(1, d_{n-1}, d_{n+1}, d_n^2)
// (at t = t_n, n >= 1).
struct Degeneration {
  enum class Kind { weighted_plane, weighted_hypersurface };
  Kind kind;
  std::vector<ZZ> weights;        // ambient weights
  std::vector<ZZ> exponents;      // hypersurface case: {d_{n+1}, d_{n-1}}
  std::string to_string() const;
};

struct Verdict {
  Quad t;
  bool fg;
  bool fano;
  std::optional<int> piece;
  std::optional<Degeneration> degeneration;
  std::string reason;
  std::string provenance;
};

// Classification of a slope per the finite-generation phase diagram:
// fg iff t is rational or t lies in the open window; Fano iff t lies in the
// open window. Slopes below 1 classify through the branch-swap reflection.
Verdict classify(const Quad& t);

// Full invariant record for v_{(a,b)} through the blowup pipeline, with the
// witness curve chosen from {C, D_n} and certified.
struct InvariantRecord {
  long a;
  long b;
  QQ t;           // b/a
  QQ A;           // (a+b)/a
  QQ T;           // normalized, T_E / a
  QQ epsilon;     // normalized
  QQ S;           // normalized
  std::string witness_name;
  CurveClass witness;
  bool witness_nef_boundary;
  std::string provenance;
};

InvariantRecord invariants_for(const NodalCubicModel& model, long a, long b,
                               int max_n = 4, const DeepenPolicy& policy = {});

}  // namespace nks

#endif  // NODALKSTAB_NODAL_CATALOG_HPP
