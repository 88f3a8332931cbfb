#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nodalkstab/local_model.hpp"

using namespace nks;

namespace {

const NodalCubicModel& model() {
  static const NodalCubicModel m;
  return m;
}

Form random_cubic(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-4, 4);
  while (true) {
    Form f(3);
    for (int e1 = 0; e1 <= 3; ++e1) {
      for (int e2 = 0; e1 + e2 <= 3; ++e2) {
        int c = coef(rng);
        if (c != 0) f.add_term({3 - e1 - e2, e1, e2}, QQ(c));
      }
    }
    if (!f.is_zero()) return f;
  }
}

// Multiplicity oracle: lowest total degree of s(1,x,y) in the naive affine
// chart, no branch coordinates involved.
int mult_at_node(const Form& s) {
  int best = INT32_MAX;
  for (const auto& [e, c] : s.terms()) {
    best = std::min(best, e[1] + e[2]);
  }
  return best;
}

}  // namespace

TEST_CASE("the cubic localizes to exactly z*w") {
  for (int n : {2, 5, 12, 30}) {
    BiSeries loc = model().localize(Form::nodal_cubic(), n);
    REQUIRE(loc.support().size() == 1);
    CHECK(loc.coeff({1, 1}) == QQ(1));
  }
}

TEST_CASE("powers of x0 localize to the constant 1") {
  for (int d : {1, 3, 7}) {
    BiSeries loc = model().localize(Form::monomial(d, 0, 0), 6);
    REQUIRE(loc.support().size() == 1);
    CHECK(loc.coeff({0, 0}) == QQ(1));
  }
}

TEST_CASE("x1 + x2 expands as w - (1/8)(z^2 - 2zw + w^2) + higher") {
  Form s = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));
  BiSeries loc = model().localize(s, 6);
  CHECK(loc.coeff({0, 0}) == QQ(0));
  CHECK(loc.coeff({1, 0}) == QQ(0));
  CHECK(loc.coeff({0, 1}) == QQ(1));
  CHECK(loc.coeff({2, 0}) == QQ(-1, 8));
  CHECK(loc.coeff({1, 1}) == QQ(1, 4));
  CHECK(loc.coeff({0, 2}) == QQ(-1, 8));
}

TEST_CASE("localize rejects the zero form") {
  CHECK_THROWS_AS(model().localize(Form(3), 4), std::invalid_argument);
}

TEST_CASE("vweight certified examples") {
  SUBCASE("node multiplicity of the cubic") {
    VWeight w = vweight(model(), MonomialValuation(1, 1), Form::nodal_cubic());
    CHECK(w.ord == 2);
    CHECK(w.v_t == QQ(2));
  }
  SUBCASE("x1 + x2 under (1,2): the w and z^2 terms tie") {
    Form s = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));
    VWeight w = vweight(model(), MonomialValuation(1, 2), s);
    CHECK(w.ord == 2);
    CHECK(w.initial == Mono2{2, 0});  // tie broken toward larger z-exponent
  }
  SUBCASE("units have order zero") {
    VWeight w = vweight(model(), MonomialValuation(3, 7), Form::monomial(5, 0, 0));
    CHECK(w.ord == 0);
    CHECK(w.v_t == QQ(0));
  }
  SUBCASE("zero section signals infinite value") {
    CHECK_THROWS_AS(vweight(model(), MonomialValuation(1, 1), Form(2)), std::domain_error);
  }
}

TEST_CASE("vweight multiplicativity and ultrametric inequality") {
  std::mt19937_64 rng(4242);
  MonomialValuation v(2, 3);
  for (int k = 0; k < 25; ++k) {
    Form s = random_cubic(rng);
    Form s2 = random_cubic(rng);
    long o1 = vweight(model(), v, s).ord;
    long o2 = vweight(model(), v, s2).ord;
    REQUIRE(vweight(model(), v, s.mul(s2)).ord == o1 + o2);
    Form sum = s.add(s2);
    if (!sum.is_zero()) {
      long os = vweight(model(), v, sum).ord;
      REQUIRE(os >= std::min(o1, o2));
      if (o1 != o2) REQUIRE(os == std::min(o1, o2));
    }
  }
}

TEST_CASE("chart consistency: (1,1) order equals naive multiplicity") {
  MonomialValuation v(1, 1);
  for (int e1 = 0; e1 <= 3; ++e1) {
    for (int e2 = 0; e1 + e2 <= 3; ++e2) {
      Form mono = Form::monomial(3 - e1 - e2, e1, e2);
      CHECK(vweight(model(), v, mono).ord == mult_at_node(mono));
    }
  }
  std::mt19937_64 rng(999);
  for (int k = 0; k < 100; ++k) {
    Form s = random_cubic(rng);
    REQUIRE(vweight(model(), v, s).ord == mult_at_node(s));
  }
}

TEST_CASE("certificate soundness: doubling the truncation never changes ord") {
  std::mt19937_64 rng(31337);
  MonomialValuation v(1, 5);
  for (int k = 0; k < 10; ++k) {
    Form s = random_cubic(rng);
    VWeight w = vweight(model(), v, s);
    BiSeries deeper = model().localize(s, 2 * w.truncation);
    long best = -1;
    for (const auto& [mn, c] : deeper.support()) {
      long ww = v.weight(mn);
      if (best < 0 || ww < best) best = ww;
    }
    REQUIRE(best == w.ord);
  }
}

TEST_CASE("colength examples and swap symmetry") {
  CHECK(colength(MonomialValuation(1, 5), ZZ(5)) == ZZ(5));
  CHECK(colength(MonomialValuation(2, 13), ZZ(26)) == ZZ(20));
  CHECK(colength(MonomialValuation(3, 4), ZZ(0)) == ZZ(0));
  for (long a = 1; a <= 5; ++a) {
    for (long b = 1; b <= 5; ++b) {
      if (std::gcd(a, b) != 1) continue;
      for (long p = 0; p <= 40; p += 7) {
        REQUIRE(colength(MonomialValuation(a, b), ZZ(p)) ==
                colength(MonomialValuation(b, a), ZZ(p)));
      }
    }
  }
}

TEST_CASE("colength matches brute force on a grid") {
  for (long a : {1L, 2L, 3L}) {
    for (long b : {1L, 4L, 7L}) {
      if (std::gcd(a, b) != 1) continue;
      MonomialValuation v(a, b);
      for (long p = 1; p <= 50; ++p) {
        long brute = 0;
        for (long i = 0; a * i < p; ++i) {
          for (long j = 0; a * i + b * j < p; ++j) ++brute;
        }
        REQUIRE(colength(v, ZZ(p)) == ZZ(brute));
      }
    }
  }
}

TEST_CASE("newton polygon of basic series") {
  BiSeries cubic_loc = model().localize(Form::nodal_cubic(), 8);
  CHECK(newton_polygon(cubic_loc) == std::vector<Mono2>{{1, 1}});

  Form line = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));
  BiSeries line_loc = model().localize(line, 8);
  CHECK(newton_polygon(line_loc) == std::vector<Mono2>{{2, 0}, {0, 1}});
}

TEST_CASE("divisor multiplicity by exact division") {
  Form line = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));  // x1 + x2
  Form sq = line.mul(line);
  Form prod = sq.mul(Form::nodal_cubic());
  CHECK(divisor_multiplicity(line, prod) == 2);
  CHECK(divisor_multiplicity(Form::nodal_cubic(), prod) == 1);
  CHECK(divisor_multiplicity(line, Form::nodal_cubic()) == 0);
}

TEST_CASE("sigma swaps the branch coordinates") {
  Form s = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));
  BiSeries plain = model().localize(s, 5);
  BiSeries flipped = model().localize(s.sigma(), 5);
  for (const auto& [mn, c] : plain.support()) {
    QQ expect = (mn.i + mn.j) % 2 == 0 ? c : QQ(-c);
    REQUIRE(flipped.coeff({mn.j, mn.i}) == expect);
  }
}

TEST_CASE("truncation cap becomes a loud error") {
  DeepenPolicy tiny;
  tiny.hard_cap = 4;
  // Multiplicity 5 at the node: certification under (1,1) needs a support
  // point of weight < N+1 = 5, which cannot exist.
  Form line = Form::monomial(0, 1, 0).add(Form::monomial(0, 0, 1));
  Form deep = Form::nodal_cubic().mul(Form::nodal_cubic()).mul(line);
  CHECK_THROWS_AS(vweight(model(), MonomialValuation(1, 1), deep, tiny),
                  TruncationExhausted);
}
