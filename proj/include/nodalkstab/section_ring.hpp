#ifndef NODALKSTAB_SECTION_RING_HPP
#define NODALKSTAB_SECTION_RING_HPP

// Anticanonical section spaces R_m = H^0(P^2, O(3m)), filtrations induced by
// monomial valuations and by effective divisors, compatible bases, and the
// finite-level invariants S_m and T_m. All linear algebra is exact over QQ.

#include <functional>
#include <optional>
#include <vector>

#include "nodalkstab/local_model.hpp"

namespace nks {

// dim H^0(P^2, O(3m)) = (3m+1)(3m+2)/2
long dim_space(int m);

// Monomial basis of degree-3m forms, in a fixed deterministic order.
std::vector<Exp3> monomial_basis(int m);

// --- exact linear algebra over QQ ------------------------------------------

using VecQ = std::vector<QQ>;

// Rows spanning a subspace of QQ^n. Reduction is plain fraction arithmetic;
// all pivots chosen deterministically (leftmost column, first row).
struct MatQ {
  std::vector<VecQ> rows;
  long cols = 0;

  long rank() const;
};

MatQ rref(const MatQ& m);
MatQ stack(const MatQ& a, const MatQ& b);
// Basis of the intersection of two row spaces.
MatQ intersect_rowspaces(const MatQ& a, const MatQ& b);
// Rows of w that are independent modulo the row space of z (greedy, in order).
std::vector<VecQ> extend_basis(const MatQ& w, const MatQ& z);

// --- compatible bases from a valuation --------------------------------------

// Basis of R_m compatible with the filtration of v: pairwise distinct initial
// (z,w)-monomials, each section's value equal to its weighted initial degree
// divided by a. Produced by Gaussian elimination on initial terms in the
// fixed monomial order (weighted degree, ties to larger z-exponent).
struct CompatibleBasis {
  MonomialValuation v;
  int m;
  std::vector<Form> sections;   // N_m forms
  std::vector<QQ> values;       // v_t values, ord/a
  std::vector<long> ords;       // integer weighted orders
  std::vector<Mono2> initials;  // distinct initial monomials
  int truncation;               // truncation certified for every pivot
};

// `shuffle_seed` permutes the elimination input order (0 = the canonical
// monomial order); the resulting value multiset is order-independent.
CompatibleBasis initial_basis(const NodalCubicModel& model, const MonomialValuation& v,
                              int m, const DeepenPolicy& policy = {},
                              uint64_t shuffle_seed = 0);

// S_m = (1/(m N_m)) * sum of values of a compatible basis.
QQ S_m(const CompatibleBasis& basis);
// Largest filtration value on R_m (the initial-term elimination attains it).
QQ T_m(const CompatibleBasis& basis);

QQ S_m(const NodalCubicModel& model, const MonomialValuation& v, int m,
       const DeepenPolicy& policy = {});
QQ T_m(const NodalCubicModel& model, const MonomialValuation& v, int m,
       const DeepenPolicy& policy = {});

// CSV table of the finite-level invariants, one row per level:
// a,b,t,m,N_m,S_m,T_m in the exact text syntax.
std::string sm_table_csv(const NodalCubicModel& model, const MonomialValuation& v,
                         int m_min, int m_max, const DeepenPolicy& policy = {});

// --- filtrations as flags ----------------------------------------------------

// A filtration on R_m presented by its jumps and flag subspaces, coefficient
// vectors taken in monomial_basis(m) order. jumps are strictly decreasing and
// positive; subspace k spans F^{jumps[k]} R_m; F^0 = R_m is implicit.
struct FlagPresentation {
  int m = 0;
  std::vector<QQ> jumps;
  std::vector<MatQ> subspaces;

  // Value of the filtration on a coefficient vector: the largest jump whose
  // subspace contains it, else 0.
  QQ value_of(const VecQ& vec) const;
};

VecQ form_to_vector(const Form& s, const std::vector<Exp3>& basis);
Form vector_to_form(const VecQ& vec, const std::vector<Exp3>& basis, int degree);

FlagPresentation valuation_flag(const CompatibleBasis& basis);

// Filtration induced by the effective divisor (g = 0): value of s is the
// divisibility multiplicity of g in s, computed by exact polynomial division.
FlagPresentation divisor_flag(const Form& g, int m);
int divisor_value(const Form& g, const Form& s);

// S_m of the divisor-induced filtration (compatible basis built on the flag
// g^j * R_{3m - j*deg g}).
QQ S_m_divisor(const Form& g, int m);

// --- joint compatible basis ---------------------------------------------------

// One basis of R_m compatible with both flags (two-flag pivoting on the
// bi-graded intersections). Values are exact filtration values.
struct JointBasis {
  int m;
  std::vector<VecQ> vectors;
  std::vector<QQ> f_values;
  std::vector<QQ> g_values;
};

JointBasis joint_compatible_basis(const FlagPresentation& f, const FlagPresentation& g);

// Rank check: for every jump of the flag, the vectors with value >= jump span
// the flag subspace exactly.
bool spans_every_jump(const JointBasis& basis, const FlagPresentation& flag,
                      bool use_f_values);

// --- basis type divisors --------------------------------------------------------

// D = (1/(m N_m)) * sum (s_i = 0) for a basis (s_i) of R_m.
struct BasisTypeDivisor {
  int m;
  std::vector<Form> sections;
};

BasisTypeDivisor basis_type_divisor(const CompatibleBasis& basis);
BasisTypeDivisor basis_type_divisor(int m, std::vector<Form> sections);

// v(D) = (1/(m N_m)) sum v(s_i), evaluated by certified vweight calls.
QQ divisor_value_under(const NodalCubicModel& model, const MonomialValuation& v,
                       const BasisTypeDivisor& d, const DeepenPolicy& policy = {});
// Coefficient of the irreducible curve (g = 0) in D.
QQ divisor_coefficient_of(const Form& g, const BasisTypeDivisor& d);

}  // namespace nks

#endif  // NODALKSTAB_SECTION_RING_HPP
