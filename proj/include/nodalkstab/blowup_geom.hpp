#ifndef NODALKSTAB_BLOWUP_GEOM_HPP
#define NODALKSTAB_BLOWUP_GEOM_HPP

// Exact intersection theory on the (a,b)-weighted blowup of the plane at the
// node: L^2 = 1, L.E = 0, E^2 = -1/(ab), log discrepancy A(E) = a+b.
// T certificates come from irreducible witness curves whose strict transform
// has nonpositive self-intersection; epsilon is always derived from the
// relation T*epsilon = 9ab and cross-checked against the intersection-
// vanishing threshold, never found by nef-cone search.

#include <optional>

#include "nodalkstab/local_model.hpp"

namespace nks {

// Class d*L - ord*E of the strict transform of a degree-d curve with
// weighted order `ord` at the node.
struct CurveClass {
  long degree;
  long ord;
  QQ self_intersection;  // d^2 - ord^2/(ab), exact
};

CurveClass strict_transform_class(const NodalCubicModel& model, const Form& curve,
                                  const MonomialValuation& v,
                                  const DeepenPolicy& policy = {});

// T certificate from an irreducible witness (irreducibility is asserted by
// the caller and recorded upstream). Returns the pseudoeffective threshold
// T = 3*ord/d in the ord_E scale; `nef_boundary` is set when the witness has
// self-intersection exactly zero, in which case the same class certifies
// epsilon as well. No certificate (self-intersection > 0) is a value, not an
// error.
struct TCertificate {
  QQ T;
  bool nef_boundary;
};

std::optional<TCertificate> t_certificate(const CurveClass& witness,
                                          bool irreducible_asserted,
                                          const MonomialValuation& v);

// T, epsilon, S in the ord_E scale: epsilon = 9ab/T and S = (T+epsilon)/3.
struct FujitaTriple {
  QQ T;
  QQ epsilon;
  QQ S;
};

FujitaTriple fujita_complete(const QQ& T, long a, long b);

// Normalized log discrepancy A(v_{(a,b)}) = (a+b)/a.
QQ log_discrepancy(const MonomialValuation& v);

}  // namespace nks

#endif  // NODALKSTAB_BLOWUP_GEOM_HPP
