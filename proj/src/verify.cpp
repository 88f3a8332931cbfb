#include "nodalkstab/verify.hpp"

#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

#include "nodalkstab/nodal_catalog.hpp"
#include "nodalkstab/scan.hpp"
#include "nodalkstab/section_ring.hpp"

namespace nks::verify {

namespace {

struct Checker {
  std::ostringstream fail;
  int failures = 0;

  template <typename A, typename B>
  void eq(const A& actual, const B& expected, const std::string& what) {
    if (!(actual == expected)) {
      ++failures;
      fail << "[" << what << " mismatch] ";
    }
  }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      fail << "[" << what << "] ";
    }
  }
};

CheckResult finish(const std::string& id, Checker& c) {
  return CheckResult{id, c.failures == 0, c.fail.str()};
}

const NodalCubicModel& model() {
  static const NodalCubicModel m;
  return m;
}

// ------------------------------------------------------------------ 1
CheckResult check_dsequence() {
  Checker c;
  DSequence seq = d_sequence(21);
  c.eq(seq.at(0), ZZ(1), "d_0");
  c.eq(seq.at(1), ZZ(1), "d_1");
  c.eq(seq.at(2), ZZ(2), "d_2");
  // Independent Fibonacci oracle.
  std::vector<ZZ> fib(44);
  fib[0] = 0;
  fib[1] = 1;
  for (int k = 2; k < 44; ++k) fib[k] = fib[k - 1] + fib[k - 2];
  for (int n = 0; n <= 20; ++n) {
    const ZZ& dn = seq.at(n);
    if (n >= 2) c.eq(dn, ZZ(3 * seq.at(n - 1) - seq.at(n - 2)), "recurrence");
    if (n + 1 <= 20) {
      c.require(1 + dn * dn + seq.at(n + 1) * seq.at(n + 1) == 3 * dn * seq.at(n + 1),
                "Markov relation at n=" + std::to_string(n));
    }
    if (n >= 1 && n + 1 <= 20) {
      c.require(dn * dn + 1 == seq.at(n - 1) * seq.at(n + 1),
                "product identity at n=" + std::to_string(n));
    }
    ZZ f = (n == 0) ? fib[1] : fib[2 * n - 1];  // F_{-1} = 1
    c.eq(dn, f, "Fibonacci at n=" + std::to_string(n));
    c.require(dn % 3 != 0, "3 divides d_" + std::to_string(n));
  }
  return finish("1 d-sequence identities (n <= 20)", c);
}

// ------------------------------------------------------------------ 2
CheckResult check_colength() {
  Checker c;
  DSequence seq = d_sequence(6);
  for (int n = 1; n <= 5; ++n) {
    long a = seq.at(n - 1).get_si();
    long b = seq.at(n + 1).get_si();
    ZZ p = seq.at(n - 1) * seq.at(n + 1);
    MonomialValuation v(a, b);
    // Brute-force lattice enumeration oracle.
    long pl = p.get_si();
    long brute = 0;
    for (long i = 0; a * i < pl; ++i) {
      for (long j = 0; a * i + b * j < pl; ++j) ++brute;
    }
    ZZ closed = (seq.at(n) * seq.at(n) + 3 * seq.at(n)) / 2;
    c.eq(colength(v, p), ZZ(brute), "colength vs brute force at n=" + std::to_string(n));
    c.eq(ZZ(brute), closed, "brute force vs closed form at n=" + std::to_string(n));
  }
  return finish("2 Pick colength vs brute force (n = 1..5)", c);
}

// ------------------------------------------------------------------ 3
CheckResult check_sm_node() {
  Checker c;
  MonomialValuation v(1, 1);
  for (int m = 1; m <= 6; ++m) {
    QQ computed = S_m(model(), v, m);
    // Independent flag-sum oracle: multiplicity >= lambda imposes
    // lambda(lambda+1)/2 conditions, so the value sum telescopes to
    // sum_{lambda=1..3m} (N_m - lambda(lambda+1)/2) = 2 m N_m.
    long nm = dim_space(m);
    long sum = 0;
    for (long lam = 1; lam <= 3 * m; ++lam) sum += nm - lam * (lam + 1) / 2;
    QQ oracle(sum, m * nm);
    oracle.canonicalize();
    c.eq(computed, oracle, "pipeline vs flag-sum oracle at m=" + std::to_string(m));
    c.eq(computed, QQ(2), "value at m=" + std::to_string(m));
  }
  c.require(S_exact(Quad(QQ(1))) == Quad(QQ(2)), "exact S at t=1");
  return finish("3 S_m(v_{(1,1)}) = 2 through the full pipeline (m = 1..6)", c);
}

// ------------------------------------------------------------------ 4
CheckResult check_sm_line() {
  Checker c;
  Form line = Form::monomial(1, 0, 0);
  for (int m = 1; m <= 6; ++m) {
    QQ computed = S_m_divisor(line, m);
    // Telescoping oracle: sum_{j=1}^{3m} h^0(O(3m-j)).
    long sum = 0;
    for (long j = 1; j <= 3 * m; ++j) {
      long d = 3 * m - j;
      sum += (d + 1) * (d + 2) / 2;
    }
    QQ oracle(sum, m * dim_space(m));
    oracle.canonicalize();
    c.eq(computed, oracle, "divisor filtration vs telescoping oracle at m=" + std::to_string(m));
    c.eq(computed, QQ(1), "value at m=" + std::to_string(m));
  }
  return finish("4 S_m(line filtration) = 1 (m = 1..6)", c);
}

// ------------------------------------------------------------------ 5
CheckResult check_dn_construction() {
  Checker c;
  DSequence seq = d_sequence(4);
  long want_deg[4] = {0, 1, 2, 5};
  for (int n = 1; n <= 3; ++n) {
    SingularCurve dn = construct_Dn(model(), n);
    c.eq(dn.solution_dim, 1L, "solution dimension at n=" + std::to_string(n));
    c.eq(dn.degree, want_deg[n], "degree at n=" + std::to_string(n));
    c.eq(ZZ(dn.ord), seq.at(n - 1) * seq.at(n + 1), "certified ord at n=" + std::to_string(n));
    std::vector<Mono2> expected = {
        {static_cast<int>(seq.at(n + 1).get_si()), 0},
        {0, static_cast<int>(seq.at(n - 1).get_si())}};
    c.require(dn.polygon == expected, "Newton polygon at n=" + std::to_string(n));
  }
  return finish("5 D_n construction (n = 1,2,3)", c);
}

// ------------------------------------------------------------------ 6
CheckResult check_fujita_pipeline() {
  Checker c;
  const std::pair<long, long> grid[] = {{1, 1}, {1, 2}, {1, 7}, {1, 8}, {2, 15}};
  for (auto [a, b] : grid) {
    InvariantRecord rec = invariants_for(model(), a, b);
    // E-scale identities: T*eps = 9ab and S = (T+eps)/3.
    QQ t_e = rec.T * QQ(a), eps_e = rec.epsilon * QQ(a), s_e = rec.S * QQ(a);
    c.require(t_e * eps_e == QQ(9) * QQ(a) * QQ(b),
              "T*eps = 9ab at (" + std::to_string(a) + "," + std::to_string(b) + ")");
    c.require(s_e == (t_e + eps_e) / QQ(3),
              "S = (T+eps)/3 at (" + std::to_string(a) + "," + std::to_string(b) + ")");
    Quad s_ex = S_exact(Quad(QQ(b, a)));
    c.require(s_ex.is_rational() && s_ex.p == rec.S,
              "Fujita S vs exact S at (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }
  InvariantRecord at7 = invariants_for(model(), 1, 7);
  c.eq(at7.S, QQ(127, 24), "S(7) = 127/24");
  return finish("6 Fujita pipeline reproduces exact S on the witness grid", c);
}

// ------------------------------------------------------------------ 7
CheckResult check_piecewise() {
  Checker c;
  DSequence seq = d_sequence(8);
  // Adjacent pieces agree at t_n for n <= 6.
  for (int n = 1; n <= 6; ++n) {
    QQ tn = QQ(seq.at(n + 1)) / QQ(seq.at(n - 1));
    QQ left = QQ(seq.at(n)) / QQ(seq.at(n - 1)) + QQ(seq.at(n - 1)) / QQ(seq.at(n)) * tn;
    QQ right = QQ(seq.at(n + 1)) / QQ(seq.at(n)) + QQ(seq.at(n)) / QQ(seq.at(n + 1)) * tn;
    c.eq(left, right, "piece continuity at t_" + std::to_string(n));
    Quad s = S_exact(Quad(tn));
    c.require(s.is_rational() && s.p == left, "S_exact at t_" + std::to_string(n));
  }
  // Scan [1, 13/2] at step 1/20.
  ScanConfig cfg;
  cfg.t_min = QQ(1);
  cfg.t_max = QQ(13, 2);
  cfg.step = QQ(1, 20);
  ScanReport report = scan(cfg);
  c.eq(report.breakpoints.size(), size_t(2), "breakpoint count");
  if (report.breakpoints.size() == 2) {
    c.require(report.breakpoints[0].at && *report.breakpoints[0].at == QQ(2),
              "breakpoint at t=2");
    c.require(report.breakpoints[1].at && *report.breakpoints[1].at == QQ(5),
              "breakpoint at t=5");
  }
  c.eq(report.pieces.size(), size_t(3), "linear piece count");
  if (report.pieces.size() == 3) {
    c.eq(report.pieces[0].slope, QQ(1), "slope on [1,2]");
    c.eq(report.pieces[1].slope, QQ(1, 2), "slope on [2,5]");
    c.eq(report.pieces[2].slope, QQ(2, 5), "slope on [5,13/2]");
  }
  // Boundary limit: the rational-function branch evaluated at the window
  // endpoint equals 3 + sqrt5 as an exact surd identity.
  Quad tstar = fano_window_upper();
  Quad limit = (tstar * tstar + Quad(11) * tstar + Quad(1)) / (Quad(3) * (tstar + Quad(1)));
  c.require(limit == Quad(QQ(3), QQ(1)), "window-endpoint value is 3+sqrt5");
  // Monotone approach of the sampled sequence S(t_n).
  DSequence seq10 = d_sequence(12);
  Quad prev(QQ(0));
  for (int n = 1; n <= 10; ++n) {
    QQ tn = QQ(seq10.at(n + 1)) / QQ(seq10.at(n - 1));
    Quad s = S_exact(Quad(tn));
    c.require(quad_less(prev, s), "monotone approach at n=" + std::to_string(n));
    c.require(quad_less(s, Quad(QQ(3), QQ(1))), "below the limit at n=" + std::to_string(n));
    prev = s;
  }
  // t_10 sits within 10^-6 of the window endpoint.
  QQ t10 = QQ(seq10.at(11)) / QQ(seq10.at(9));
  c.require(quad_less(Quad(t10), tstar), "t_10 below the endpoint");
  c.require(quad_less(tstar - Quad(t10), Quad(QQ(1, 1000000))), "t_10 within 1e-6");
  return finish("7 piecewise continuity, breakpoint recovery, boundary limit", c);
}

// ------------------------------------------------------------------ 8
CheckResult check_classifier() {
  Checker c;
  struct Case {
    Quad t;
    bool fg;
    bool fano;
    std::string label;
  };
  Quad tstar = fano_window_upper();
  std::vector<Case> cases = {
      {Quad(QQ(1, 2)), true, true, "t=1/2"},
      {Quad(QQ(1)), true, true, "t=1"},
      {Quad(QQ(3)), true, true, "t=3"},
      {Quad(QQ(5)), true, true, "t=5"},
      {Quad(QQ(22, 3)), true, false, "t=22/3"},
      {Quad(QQ(7)), true, false, "t=7"},
      {Quad(QQ(4), QQ(1)), true, true, "t=4+sqrt5"},
      {Quad(QQ(7), QQ(1)), false, false, "t=7+sqrt5"},
      {tstar, false, false, "t=(7+3sqrt5)/2"},
  };
  for (const auto& tc : cases) {
    Verdict v = classify(tc.t);
    c.require(v.fg == tc.fg, tc.label + " fg flag");
    c.require(v.fano == tc.fano, tc.label + " fano flag");
    c.require(!v.fano || v.fg, tc.label + " coherence fano => fg");
  }
  // Descriptors.
  Verdict v3 = classify(Quad(QQ(3)));
  c.require(v3.piece && *v3.piece == 1, "t=3 piece");
  c.require(v3.degeneration &&
                v3.degeneration->kind == Degeneration::Kind::weighted_plane &&
                v3.degeneration->weights == std::vector<ZZ>({ZZ(1), ZZ(1), ZZ(4)}),
            "t=3 degeneration P(1,1,4)");
  Verdict v5 = classify(Quad(QQ(5)));
  c.require(v5.degeneration &&
                v5.degeneration->kind == Degeneration::Kind::weighted_hypersurface &&
                v5.degeneration->weights ==
                    std::vector<ZZ>({ZZ(1), ZZ(1), ZZ(5), ZZ(4)}) &&
                v5.degeneration->exponents == std::vector<ZZ>({ZZ(5), ZZ(1)}),
            "t=5 degeneration x0*x3 = x1^5 + x2 in P(1,1,5,4)");
  return finish("8 classifier conformance on the nine reference slopes", c);
}

// ------------------------------------------------------------------ 9
CheckResult check_property_suites() {
  Checker c;
  // Finite-level concavity through joint compatible bases: for monomial
  // v_0, v_1 and the slope-interpolated v_u, S_m(v_u) >= (1-u) S_m(v_0)
  // + u S_m(v_1), exactly.
  auto concavity = [&](QQ t0, QQ t1, int m, QQ u) {
    QQ ts = (1 - u) * t0 + u * t1;
    auto val = [&](const QQ& t) {
      return MonomialValuation(t.get_den().get_si(), t.get_num().get_si());
    };
    QQ s0 = S_m(model(), val(t0), m);
    QQ s1 = S_m(model(), val(t1), m);
    QQ ss = S_m(model(), val(ts), m);
    c.require(ss >= (1 - u) * s0 + u * s1,
              "concavity t0=" + qq_to_string(t0) + " t1=" + qq_to_string(t1) +
                  " u=" + qq_to_string(u) + " m=" + std::to_string(m));
  };
  const QQ us[3] = {QQ(1, 4), QQ(1, 2), QQ(3, 4)};
  for (int m = 1; m <= 4; ++m) {
    for (const QQ& u : us) concavity(QQ(1), QQ(2), m, u);
  }
  for (int m = 1; m <= 2; ++m) {
    for (const QQ& u : us) {
      concavity(QQ(2), QQ(5), m, u);
      concavity(QQ(1), QQ(3), m, u);
    }
  }

  // Valuation multiplicativity and ultrametric on 100 random form pairs.
  std::mt19937_64 rng(20240811);
  std::uniform_int_distribution<int> coef(-3, 3);
  auto random_form = [&](int degree) {
    while (true) {
      Form f(degree);
      for (int e1 = 0; e1 <= degree; ++e1) {
        for (int e2 = 0; e1 + e2 <= degree; ++e2) {
          int cc = coef(rng);
          if (cc != 0) f.add_term({degree - e1 - e2, e1, e2}, QQ(cc));
        }
      }
      if (!f.is_zero()) return f;
    }
  };
  const MonomialValuation vs[2] = {MonomialValuation(1, 2), MonomialValuation(2, 3)};
  for (int k = 0; k < 100; ++k) {
    const MonomialValuation& v = vs[k % 2];
    Form s = random_form(1 + k % 3);
    Form s2 = random_form(1 + (k / 2) % 3);
    long o1 = vweight(model(), v, s).ord;
    long o2 = vweight(model(), v, s2).ord;
    long oprod = vweight(model(), v, s.mul(s2)).ord;
    c.require(oprod == o1 + o2, "multiplicativity pair " + std::to_string(k));
    if (s.degree() == s2.degree()) {
      Form sum = s.add(s2);
      if (!sum.is_zero()) {
        long osum = vweight(model(), v, sum).ord;
        c.require(osum >= std::min(o1, o2), "ultrametric pair " + std::to_string(k));
        if (o1 != o2) {
          c.require(osum == std::min(o1, o2), "ultrametric equality pair " + std::to_string(k));
        }
      }
    }
  }

  // Swap symmetry: the branch swap exchanges z and w, so the integer
  // weighted orders of (a,b) and (b,a) agree as multisets and the
  // normalized invariants match after the slope rescale a*S_m(a,b) =
  // b*S_m(b,a) (the finite-level form of S(1/t) = S(t)/t).
  const std::pair<long, long> swaps[] = {{1, 2}, {2, 3}, {1, 3}};
  for (auto [a, b] : swaps) {
    for (int m = 1; m <= 2; ++m) {
      CompatibleBasis lhs = initial_basis(model(), MonomialValuation(a, b), m);
      CompatibleBasis rhs = initial_basis(model(), MonomialValuation(b, a), m);
      std::vector<long> lords = lhs.ords, rords = rhs.ords;
      std::sort(lords.begin(), lords.end());
      std::sort(rords.begin(), rords.end());
      c.require(lords == rords, "swap ord multiset (" + std::to_string(a) + "," +
                                    std::to_string(b) + ") m=" + std::to_string(m));
      c.require(QQ(a) * S_m(lhs) == QQ(b) * S_m(rhs),
                "swap S_m (" + std::to_string(a) + "," + std::to_string(b) +
                    ") m=" + std::to_string(m));
      c.require(QQ(a) * T_m(lhs) == QQ(b) * T_m(rhs),
                "swap T_m (" + std::to_string(a) + "," + std::to_string(b) +
                    ") m=" + std::to_string(m));
    }
  }

  // Compatible-basis independence under permuted elimination orders.
  for (int m = 1; m <= 3; ++m) {
    QQ reference = S_m(model(), MonomialValuation(1, 2), m);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      CompatibleBasis basis = initial_basis(model(), MonomialValuation(1, 2), m, {}, seed);
      c.require(S_m(basis) == reference,
                "elimination-order independence m=" + std::to_string(m) + " seed=" +
                    std::to_string(seed));
    }
  }

  // Joint compatible bases pass both rank checks at every jump.
  for (int m = 1; m <= 2; ++m) {
    FlagPresentation f = valuation_flag(initial_basis(model(), MonomialValuation(1, 1), m));
    FlagPresentation g = divisor_flag(Form::monomial(1, 0, 0), m);
    JointBasis joint = joint_compatible_basis(f, g);
    c.require(spans_every_jump(joint, f, true), "joint (v,line) F-spans m=" + std::to_string(m));
    c.require(spans_every_jump(joint, g, false), "joint (v,line) G-spans m=" + std::to_string(m));

    FlagPresentation f2 = valuation_flag(initial_basis(model(), MonomialValuation(1, 2), m));
    FlagPresentation g2 = valuation_flag(initial_basis(model(), MonomialValuation(2, 1), m));
    JointBasis joint2 = joint_compatible_basis(f2, g2);
    c.require(spans_every_jump(joint2, f2, true), "joint (v12,v21) F-spans m=" + std::to_string(m));
    c.require(spans_every_jump(joint2, g2, false), "joint (v12,v21) G-spans m=" + std::to_string(m));
  }
  return finish("9 property suites (concavity, valuation laws, symmetry, bases)", c);
}

// ------------------------------------------------------------------ 10
CheckResult check_delta_scan() {
  Checker c;
  ScanConfig cfg;
  cfg.t_min = QQ(1, 2);
  cfg.t_max = QQ(13, 2);
  cfg.step = QQ(1, 4);
  DeltaReport report = delta_upper_bound(cfg);
  c.eq(report.min_ratio, QQ(1), "minimum of A/S");
  for (const auto& row : report.rows) {
    c.require(!row.failed && row.ratio >= 1, "ratio >= 1 at t=" + qq_to_string(row.t));
  }
  std::vector<QQ> expected_argmin;
  for (QQ t = QQ(1, 2); t <= QQ(2); t += QQ(1, 4)) expected_argmin.push_back(t);
  c.require(report.argmin == expected_argmin, "argmin equals [1/2,2] grid points");
  return finish("10 delta upper-bound scan over [1/2, 13/2]", c);
}

// ------------------------------------------------------------------ 11
CheckResult check_determinism() {
  Checker c;
  ScanConfig cfg;
  cfg.t_min = QQ(1);
  cfg.t_max = QQ(13, 2);
  cfg.step = QQ(1, 20);

  ScanConfig serial = cfg;
  serial.threads = 1;
  ScanConfig parallel = cfg;
  parallel.threads = 4;
  std::string csv_serial = to_csv(scan(serial));
  std::string csv_parallel = to_csv(scan(parallel));
  c.require(csv_serial == csv_parallel, "serial vs parallel CSV bytes");

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("nks-verify-" + std::to_string(fnv1a64(csv_serial) % 100000));
  std::error_code ec;
  fs::remove_all(dir, ec);
  ScanConfig cached = cfg;
  cached.cache_dir = dir.string();
  ScanReport first = scan(cached);
  ScanReport second = scan(cached);
  c.require(!first.from_cache, "first run computes");
  c.require(second.from_cache, "second run hits the cache");
  c.require(to_csv(first) == to_csv(second), "warm-cache CSV bytes");
  c.require(to_csv(first) == csv_serial, "cached vs direct CSV bytes");
  fs::remove_all(dir, ec);
  return finish("11 determinism (parallel, warm cache)", c);
}

}  // namespace

std::vector<CheckResult> run_acceptance() {
  std::vector<CheckResult> results;
  results.push_back(check_dsequence());
  results.push_back(check_colength());
  results.push_back(check_sm_node());
  results.push_back(check_sm_line());
  results.push_back(check_dn_construction());
  results.push_back(check_fujita_pipeline());
  results.push_back(check_piecewise());
  results.push_back(check_classifier());
  results.push_back(check_property_suites());
  results.push_back(check_delta_scan());
  results.push_back(check_determinism());
  return results;
}

std::string render_lines(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "]";
    if (!r.pass && !r.detail.empty()) os << " " << r.detail;
    os << "\n";
  }
  return os.str();
}

int count_failures(const std::vector<CheckResult>& results) {
  int n = 0;
  for (const auto& r : results) n += r.pass ? 0 : 1;
  return n;
}

}  // namespace nks::verify
