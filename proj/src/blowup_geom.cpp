#include "nodalkstab/blowup_geom.hpp"

namespace nks {

CurveClass strict_transform_class(const NodalCubicModel& model, const Form& curve,
                                  const MonomialValuation& v,
                                  const DeepenPolicy& policy) {
  if (curve.is_zero()) throw std::invalid_argument("strict_transform_class: zero curve");
  VWeight w = vweight(model, v, curve, policy);
  QQ self = QQ(static_cast<long>(curve.degree())) * QQ(static_cast<long>(curve.degree())) -
            QQ(w.ord) * QQ(w.ord) / (QQ(v.a) * QQ(v.b));
  return CurveClass{curve.degree(), w.ord, self};
}

std::optional<TCertificate> t_certificate(const CurveClass& witness,
                                          bool irreducible_asserted,
                                          const MonomialValuation& v) {
  if (!irreducible_asserted) {
    throw std::invalid_argument("t_certificate: witness must be asserted irreducible");
  }
  if (witness.self_intersection > 0) return std::nullopt;
  if (witness.degree <= 0 || witness.ord <= 0) {
    throw std::invalid_argument("t_certificate: degenerate witness class");
  }
  QQ T = QQ(3) * QQ(witness.ord) / QQ(witness.degree);
  // Cross-check: the intersection-vanishing threshold lambda with
  // (3L - lambda*E).(dL - ord*E) = 0 is 3*d*ab/ord, and lambda*T = 9ab.
  QQ lambda = QQ(3) * QQ(witness.degree) * QQ(v.a) * QQ(v.b) / QQ(witness.ord);
  if (lambda * T != QQ(9) * QQ(v.a) * QQ(v.b)) {
    throw std::logic_error("t_certificate: intersection identity failed");
  }
  return TCertificate{T, witness.self_intersection == 0};
}

FujitaTriple fujita_complete(const QQ& T, long a, long b) {
  if (T <= 0) throw std::invalid_argument("fujita_complete: T must be positive");
  QQ epsilon = QQ(9) * QQ(a) * QQ(b) / T;
  QQ S = (T + epsilon) / QQ(3);
  return FujitaTriple{T, epsilon, S};
}

QQ log_discrepancy(const MonomialValuation& v) { return QQ(v.a + v.b, v.a); }

}  // namespace nks
