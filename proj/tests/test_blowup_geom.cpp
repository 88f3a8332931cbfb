#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "nodalkstab/blowup_geom.hpp"
#include "nodalkstab/nodal_catalog.hpp"

using namespace nks;

namespace {

const NodalCubicModel& model() {
  static const NodalCubicModel m;
  return m;
}

}  // namespace

TEST_CASE("strict transform classes") {
  SUBCASE("cubic under (1,7): negative self-intersection") {
    CurveClass c = strict_transform_class(model(), Form::nodal_cubic(),
                                          MonomialValuation(1, 7));
    CHECK(c.degree == 3);
    CHECK(c.ord == 8);
    CHECK(c.self_intersection == QQ(-1, 7));
  }
  SUBCASE("cubic under (1,1): positive") {
    CurveClass c = strict_transform_class(model(), Form::nodal_cubic(),
                                          MonomialValuation(1, 1));
    CHECK(c.ord == 2);
    CHECK(c.self_intersection == QQ(5));
  }
  SUBCASE("D_1 under (1,2): a (-1)-class") {
    SingularCurve d1 = construct_Dn(model(), 1);
    CurveClass c = strict_transform_class(model(), d1.curve, MonomialValuation(1, 2));
    CHECK(c.degree == 1);
    CHECK(c.ord == 2);
    CHECK(c.self_intersection == QQ(-1));
  }
}

TEST_CASE("t certificates") {
  SUBCASE("negative witness certifies T") {
    CurveClass c{3, 8, QQ(-1, 7)};
    auto cert = t_certificate(c, true, MonomialValuation(1, 7));
    REQUIRE(cert.has_value());
    CHECK(cert->T == QQ(8));
    CHECK_FALSE(cert->nef_boundary);
  }
  SUBCASE("zero witness certifies T and the nef boundary") {
    CurveClass c{1, 1, QQ(0)};
    auto cert = t_certificate(c, true, MonomialValuation(1, 1));
    REQUIRE(cert.has_value());
    CHECK(cert->T == QQ(3));
    CHECK(cert->nef_boundary);
  }
  SUBCASE("positive self-intersection yields no certificate") {
    CurveClass c{3, 2, QQ(5)};
    CHECK_FALSE(t_certificate(c, true, MonomialValuation(1, 1)).has_value());
  }
  SUBCASE("D_1 under (1,2) certifies T = 6") {
    CurveClass c{1, 2, QQ(-1)};
    auto cert = t_certificate(c, true, MonomialValuation(1, 2));
    REQUIRE(cert.has_value());
    CHECK(cert->T == QQ(6));
  }
}

TEST_CASE("fujita completion") {
  SUBCASE("(1,7): S matches the rational-function value at t=7") {
    FujitaTriple f = fujita_complete(QQ(8), 1, 7);
    CHECK(f.epsilon == QQ(63, 8));
    CHECK(f.S == QQ(127, 24));
    CHECK(f.T * f.epsilon == QQ(63));
  }
  SUBCASE("(1,1)") {
    FujitaTriple f = fujita_complete(QQ(3), 1, 1);
    CHECK(f.epsilon == QQ(3));
    CHECK(f.S == QQ(2));
  }
  SUBCASE("(1,2)") {
    FujitaTriple f = fujita_complete(QQ(6), 1, 2);
    CHECK(f.epsilon == QQ(3));
    CHECK(f.S == QQ(3));
  }
  SUBCASE("nonpositive T rejected") {
    CHECK_THROWS_AS(fujita_complete(QQ(0), 1, 1), std::invalid_argument);
  }
}

TEST_CASE("log discrepancy normalization") {
  CHECK(log_discrepancy(MonomialValuation(1, 1)) == QQ(2));
  CHECK(log_discrepancy(MonomialValuation(1, 7)) == QQ(8));
  CHECK(log_discrepancy(MonomialValuation(2, 1)) == QQ(3, 2));
  // matches 1 + t after normalization on a small grid
  for (long a = 1; a <= 4; ++a) {
    for (long b = 1; b <= 4; ++b) {
      if (std::gcd(a, b) != 1) continue;
      REQUIRE(log_discrepancy(MonomialValuation(a, b)) == QQ(1) + QQ(b, a));
    }
  }
}
