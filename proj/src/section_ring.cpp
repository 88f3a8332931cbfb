#include "nodalkstab/section_ring.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

namespace nks {

long dim_space(int m) {
  if (m < 0) throw std::invalid_argument("dim_space: m must be >= 0");
  long d = 3L * m;
  return (d + 1) * (d + 2) / 2;
}

std::vector<Exp3> monomial_basis(int m) {
  std::vector<Exp3> basis;
  int d = 3 * m;
  for (int e1 = 0; e1 <= d; ++e1) {
    for (int e2 = 0; e2 + e1 <= d; ++e2) {
      basis.push_back({d - e1 - e2, e1, e2});
    }
  }
  return basis;
}

// --- linear algebra ------------------------------------------------------------

long MatQ::rank() const { return static_cast<long>(rref(*this).rows.size()); }

MatQ rref(const MatQ& m) {
  MatQ r = m;
  long nrows = static_cast<long>(r.rows.size());
  long lead = 0;
  long row = 0;
  QQ tmp;
  for (; lead < r.cols && row < nrows; ++lead) {
    long piv = -1;
    for (long k = row; k < nrows; ++k) {
      if (r.rows[k][lead] != 0) {
        piv = k;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(r.rows[row], r.rows[piv]);
    QQ inv = QQ(1) / r.rows[row][lead];
    for (long c = lead; c < r.cols; ++c) r.rows[row][c] *= inv;
    for (long k = 0; k < nrows; ++k) {
      if (k == row || r.rows[k][lead] == 0) continue;
      QQ factor = r.rows[k][lead];
      for (long c = lead; c < r.cols; ++c) {
        tmp = factor * r.rows[row][c];
        r.rows[k][c] -= tmp;
      }
    }
    ++row;
  }
  r.rows.resize(row);
  return r;
}

MatQ stack(const MatQ& a, const MatQ& b) {
  if (!a.rows.empty() && !b.rows.empty() && a.cols != b.cols) {
    throw std::invalid_argument("stack: column mismatch");
  }
  MatQ r;
  r.cols = std::max(a.cols, b.cols);
  r.rows = a.rows;
  r.rows.insert(r.rows.end(), b.rows.begin(), b.rows.end());
  return r;
}

namespace {

bool in_rowspace(const MatQ& reduced, const VecQ& vec) {
  // reduced must be in RREF. Reduce vec against it and test for zero.
  VecQ v = vec;
  QQ tmp;
  for (const auto& row : reduced.rows) {
    long lead = -1;
    for (long c = 0; c < reduced.cols; ++c) {
      if (row[c] != 0) {
        lead = c;
        break;
      }
    }
    if (lead < 0) continue;
    if (v[lead] == 0) continue;
    QQ factor = v[lead];
    for (long c = lead; c < reduced.cols; ++c) {
      tmp = factor * row[c];
      v[c] -= tmp;
    }
  }
  for (const auto& x : v) {
    if (x != 0) return false;
  }
  return true;
}

}  // namespace

MatQ intersect_rowspaces(const MatQ& a, const MatQ& b) {
  // Zassenhaus: row-reduce [A|A; B|0]; rows with zero left half carry an
  // intersection basis in the right half.
  long n = std::max(a.cols, b.cols);
  MatQ big;
  big.cols = 2 * n;
  for (const auto& row : a.rows) {
    VecQ r(2 * n, QQ(0));
    for (long c = 0; c < n; ++c) {
      r[c] = row[c];
      r[n + c] = row[c];
    }
    big.rows.push_back(std::move(r));
  }
  for (const auto& row : b.rows) {
    VecQ r(2 * n, QQ(0));
    for (long c = 0; c < n; ++c) r[c] = row[c];
    big.rows.push_back(std::move(r));
  }
  MatQ red = rref(big);
  MatQ out;
  out.cols = n;
  for (const auto& row : red.rows) {
    bool left_zero = true;
    for (long c = 0; c < n; ++c) {
      if (row[c] != 0) {
        left_zero = false;
        break;
      }
    }
    if (!left_zero) continue;
    VecQ r(n);
    for (long c = 0; c < n; ++c) r[c] = row[n + c];
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::vector<VecQ> extend_basis(const MatQ& w, const MatQ& z) {
  MatQ acc = rref(z);
  acc.cols = w.cols;
  std::vector<VecQ> out;
  for (const auto& row : w.rows) {
    if (in_rowspace(acc, row)) continue;
    out.push_back(row);
    MatQ next = acc;
    next.rows.push_back(row);
    acc = rref(next);
  }
  return out;
}

// --- initial_basis ---------------------------------------------------------------

namespace {

struct MonoOrder {
  // Positions of all (i,j) with i+j <= N in the fixed order: weighted degree
  // ascending, ties broken by larger z-exponent first.
  std::vector<Mono2> monos;
  std::map<Mono2, long> position;
  std::vector<long> weights;

  MonoOrder(const MonomialValuation& v, int trunc) {
    for (int i = 0; i <= trunc; ++i) {
      for (int j = 0; i + j <= trunc; ++j) {
        monos.push_back({i, j});
      }
    }
    std::sort(monos.begin(), monos.end(), [&](const Mono2& x, const Mono2& y) {
      long wx = v.weight(x), wy = v.weight(y);
      if (wx != wy) return wx < wy;
      return x.i > y.i;
    });
    weights.resize(monos.size());
    for (size_t k = 0; k < monos.size(); ++k) {
      position[monos[k]] = static_cast<long>(k);
      weights[k] = v.weight(monos[k]);
    }
  }
};

struct WorkRow {
  VecQ series;  // dense over MonoOrder positions
  VecQ combo;   // coefficients in the R_m monomial basis
  long head;    // first nonzero series position, or -1

  void recompute_head(long from) {
    head = -1;
    for (long k = from; k < static_cast<long>(series.size()); ++k) {
      if (series[k] != 0) {
        head = k;
        break;
      }
    }
  }
};

// r -= (r[h]/p[h]) * p  for series and combo, h = p.head
void reduce_row(WorkRow& r, const WorkRow& p) {
  QQ factor = r.series[p.head] / p.series[p.head];
  QQ tmp;
  for (long k = p.head; k < static_cast<long>(p.series.size()); ++k) {
    if (p.series[k] == 0) continue;
    tmp = factor * p.series[k];
    r.series[k] -= tmp;
  }
  for (size_t k = 0; k < p.combo.size(); ++k) {
    if (p.combo[k] == 0) continue;
    tmp = factor * p.combo[k];
    r.combo[k] -= tmp;
  }
}

}  // namespace

CompatibleBasis initial_basis(const NodalCubicModel& model, const MonomialValuation& v,
                              int m, const DeepenPolicy& policy, uint64_t shuffle_seed) {
  if (m < 0) throw std::invalid_argument("initial_basis: m must be >= 0");
  const long nm = dim_space(m);
  const auto mono3 = monomial_basis(m);
  int N = policy.initial(3 * m, v);

  while (true) {
    MonoOrder order(v, N);
    const long cert_bound = v.min_weight() * static_cast<long>(N + 1);

    std::vector<long> input_order(nm);
    for (long k = 0; k < nm; ++k) input_order[k] = k;
    if (shuffle_seed != 0) {
      std::mt19937_64 rng(shuffle_seed);
      std::shuffle(input_order.begin(), input_order.end(), rng);
    }

    std::vector<WorkRow> done;
    done.reserve(nm);
    std::map<long, size_t> owner;  // head position -> index into done
    bool ok = true;

    for (long idx = 0; idx < nm && ok; ++idx) {
      const Exp3& e = mono3[input_order[idx]];
      BiSeries loc = model.localize(Form::monomial(e[0], e[1], e[2]), N);
      WorkRow row;
      row.series.assign(order.monos.size(), QQ(0));
      row.combo.assign(nm, QQ(0));
      row.combo[input_order[idx]] = 1;
      for (const auto& [mn, c] : loc.support()) {
        row.series[order.position.at(mn)] = c;
      }
      row.recompute_head(0);
      while (row.head >= 0) {
        auto it = owner.find(row.head);
        if (it == owner.end()) break;
        reduce_row(row, done[it->second]);
        row.recompute_head(row.head);
      }
      if (row.head < 0 || order.weights[row.head] >= cert_bound) {
        // Cancellation beyond the certified window: deepen and restart.
        ok = false;
        break;
      }
      owner[row.head] = done.size();
      done.push_back(std::move(row));
    }

    if (ok) {
      CompatibleBasis out{v, m, {}, {}, {}, {}, N};
      out.sections.reserve(nm);
      for (const auto& row : done) {
        Form s(3 * m);
        for (long k = 0; k < nm; ++k) {
          if (row.combo[k] != 0) {
            s.add_term(mono3[k], row.combo[k]);
          }
        }
        out.sections.push_back(std::move(s));
        long w = order.weights[row.head];
        out.ords.push_back(w);
        QQ vt(w, v.a);
        vt.canonicalize();
        out.values.push_back(vt);
        out.initials.push_back(order.monos[row.head]);
      }
      return out;
    }
    if (N >= policy.hard_cap) {
      throw TruncationExhausted("initial_basis: truncation cap " +
                                std::to_string(policy.hard_cap) + " reached at m=" +
                                std::to_string(m) + ", weights (" +
                                std::to_string(v.a) + "," + std::to_string(v.b) + ")");
    }
    N = std::min(2 * N, policy.hard_cap);
  }
}

QQ S_m(const CompatibleBasis& basis) {
  if (basis.m < 1) throw std::invalid_argument("S_m: m must be >= 1");
  QQ total(0);
  for (const auto& val : basis.values) total += val;
  return total / (QQ(basis.m) * QQ(dim_space(basis.m)));
}

QQ T_m(const CompatibleBasis& basis) {
  if (basis.m < 1) throw std::invalid_argument("T_m: m must be >= 1");
  QQ best(0);
  for (const auto& val : basis.values) best = std::max(best, val);
  return best;
}

QQ S_m(const NodalCubicModel& model, const MonomialValuation& v, int m,
       const DeepenPolicy& policy) {
  return S_m(initial_basis(model, v, m, policy));
}

QQ T_m(const NodalCubicModel& model, const MonomialValuation& v, int m,
       const DeepenPolicy& policy) {
  return T_m(initial_basis(model, v, m, policy));
}

std::string sm_table_csv(const NodalCubicModel& model, const MonomialValuation& v,
                         int m_min, int m_max, const DeepenPolicy& policy) {
  if (m_min < 1 || m_max < m_min) {
    throw std::invalid_argument("sm_table_csv: need 1 <= m_min <= m_max");
  }
  std::ostringstream os;
  os << "a,b,t,m,N_m,S_m,T_m\n";
  for (int m = m_min; m <= m_max; ++m) {
    CompatibleBasis basis = initial_basis(model, v, m, policy);
    os << v.a << ',' << v.b << ',' << qq_to_string(v.slope()) << ',' << m << ','
       << dim_space(m) << ',' << qq_to_string(S_m(basis)) << ','
       << qq_to_string(T_m(basis)) << '\n';
  }
  return os.str();
}

// --- flags -------------------------------------------------------------------------

VecQ form_to_vector(const Form& s, const std::vector<Exp3>& basis) {
  VecQ vec(basis.size(), QQ(0));
  std::map<Exp3, size_t> pos;
  for (size_t k = 0; k < basis.size(); ++k) pos[basis[k]] = k;
  for (const auto& [e, c] : s.terms()) {
    auto it = pos.find(e);
    if (it == pos.end()) throw std::invalid_argument("form_to_vector: degree mismatch");
    vec[it->second] = c;
  }
  return vec;
}

Form vector_to_form(const VecQ& vec, const std::vector<Exp3>& basis, int degree) {
  Form s(degree);
  for (size_t k = 0; k < basis.size(); ++k) {
    if (vec[k] != 0) s.add_term(basis[k], vec[k]);
  }
  return s;
}

QQ FlagPresentation::value_of(const VecQ& vec) const {
  // jumps descending, subspaces nested ascending: the first containment hit
  // is the largest jump.
  for (size_t k = 0; k < jumps.size(); ++k) {
    if (in_rowspace(subspaces[k], vec)) return jumps[k];
  }
  return QQ(0);
}

FlagPresentation valuation_flag(const CompatibleBasis& basis) {
  const auto mono3 = monomial_basis(basis.m);
  // Distinct values descending.
  std::vector<QQ> jumps = basis.values;
  std::sort(jumps.begin(), jumps.end(), [](const QQ& x, const QQ& y) { return x > y; });
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  while (!jumps.empty() && jumps.back() == 0) jumps.pop_back();

  FlagPresentation f;
  f.m = basis.m;
  for (const auto& lam : jumps) {
    MatQ sub;
    sub.cols = static_cast<long>(mono3.size());
    for (size_t k = 0; k < basis.sections.size(); ++k) {
      if (basis.values[k] >= lam) {
        sub.rows.push_back(form_to_vector(basis.sections[k], mono3));
      }
    }
    f.jumps.push_back(lam);
    f.subspaces.push_back(rref(sub));
  }
  return f;
}

int divisor_value(const Form& g, const Form& s) { return divisor_multiplicity(g, s); }

FlagPresentation divisor_flag(const Form& g, int m) {
  if (g.is_zero() || g.degree() == 0) {
    throw std::invalid_argument("divisor_flag: curve must have positive degree");
  }
  const auto mono3 = monomial_basis(m);
  const int d = 3 * m;
  FlagPresentation f;
  f.m = m;
  Form power = g;
  for (int j = 1; j * g.degree() <= d; ++j) {
    // F^j R_m = g^j * (forms of degree d - j*deg g)
    MatQ sub;
    sub.cols = static_cast<long>(mono3.size());
    int rest = d - j * g.degree();
    for (int e1 = 0; e1 <= rest; ++e1) {
      for (int e2 = 0; e1 + e2 <= rest; ++e2) {
        Form s = power.mul(Form::monomial(rest - e1 - e2, e1, e2));
        sub.rows.push_back(form_to_vector(s, mono3));
      }
    }
    f.jumps.push_back(QQ(j));
    f.subspaces.push_back(rref(sub));
    power = power.mul(g);
  }
  std::reverse(f.jumps.begin(), f.jumps.end());
  std::reverse(f.subspaces.begin(), f.subspaces.end());
  return f;
}

QQ S_m_divisor(const Form& g, int m) {
  if (m < 1) throw std::invalid_argument("S_m_divisor: m must be >= 1");
  // Values are integers, so the compatible-basis value sum telescopes to
  // sum_{j>=1} dim F^j R_m.
  FlagPresentation f = divisor_flag(g, m);
  QQ total(0);
  for (size_t k = 0; k < f.jumps.size(); ++k) {
    total += QQ(static_cast<long>(f.subspaces[k].rows.size()));
  }
  return total / (QQ(m) * QQ(dim_space(m)));
}

// --- joint compatible basis -----------------------------------------------------

JointBasis joint_compatible_basis(const FlagPresentation& f, const FlagPresentation& g) {
  if (f.m != g.m) throw std::invalid_argument("joint basis: level mismatch");
  const auto mono3 = monomial_basis(f.m);
  const long n = static_cast<long>(mono3.size());

  // Chains ascending by inclusion, ending with the full space.
  auto chain_of = [&](const FlagPresentation& flag) {
    std::vector<MatQ> chain;      // W_1 subset ... subset W_p = R_m
    std::vector<QQ> chain_vals;   // value attached to each layer (0 for full)
    for (size_t k = 0; k < flag.jumps.size(); ++k) {
      chain.push_back(flag.subspaces[k]);
      chain_vals.push_back(flag.jumps[k]);
    }
    MatQ full;
    full.cols = n;
    for (long r = 0; r < n; ++r) {
      VecQ row(n, QQ(0));
      row[r] = 1;
      full.rows.push_back(std::move(row));
    }
    chain.push_back(full);
    chain_vals.push_back(QQ(0));
    return std::make_pair(chain, chain_vals);
  };

  auto [fc, fv] = chain_of(f);
  auto [gc, gv] = chain_of(g);

  JointBasis out;
  out.m = f.m;
  // Walk the bi-grid from the deepest subspaces outward; at cell (i,j) add
  // vectors of fc[i] cap gc[j] independent of what has been taken so far in
  // the union of the two predecessor cells.
  std::vector<std::vector<MatQ>> cell(fc.size(), std::vector<MatQ>(gc.size()));
  for (size_t i = 0; i < fc.size(); ++i) {
    for (size_t j = 0; j < gc.size(); ++j) {
      cell[i][j] = intersect_rowspaces(fc[i], gc[j]);
    }
  }
  for (size_t i = 0; i < fc.size(); ++i) {
    for (size_t j = 0; j < gc.size(); ++j) {
      MatQ prev;
      prev.cols = n;
      if (i > 0) prev = stack(prev, cell[i - 1][j]);
      if (j > 0) prev = stack(prev, cell[i][j - 1]);
      auto fresh = extend_basis(cell[i][j], prev);
      for (auto& vec : fresh) {
        out.vectors.push_back(std::move(vec));
        out.f_values.push_back(fv[i]);
        out.g_values.push_back(gv[j]);
      }
    }
  }
  if (static_cast<long>(out.vectors.size()) != n) {
    throw std::logic_error("joint_compatible_basis: did not produce a full basis");
  }
  return out;
}

bool spans_every_jump(const JointBasis& basis, const FlagPresentation& flag,
                      bool use_f_values) {
  const auto& vals = use_f_values ? basis.f_values : basis.g_values;
  for (size_t k = 0; k < flag.jumps.size(); ++k) {
    MatQ span;
    span.cols = flag.subspaces[k].cols;
    for (size_t r = 0; r < basis.vectors.size(); ++r) {
      if (vals[r] >= flag.jumps[k]) span.rows.push_back(basis.vectors[r]);
    }
    MatQ reduced = rref(span);
    if (static_cast<long>(reduced.rows.size()) !=
        static_cast<long>(flag.subspaces[k].rows.size())) {
      return false;
    }
    for (const auto& row : flag.subspaces[k].rows) {
      if (!in_rowspace(reduced, row)) return false;
    }
  }
  return true;
}

// --- basis type divisors -----------------------------------------------------------

BasisTypeDivisor basis_type_divisor(const CompatibleBasis& basis) {
  if (basis.m < 1) throw std::invalid_argument("basis_type_divisor: m must be >= 1");
  return BasisTypeDivisor{basis.m, basis.sections};
}

BasisTypeDivisor basis_type_divisor(int m, std::vector<Form> sections) {
  if (m < 1) throw std::invalid_argument("basis_type_divisor: m must be >= 1");
  if (static_cast<long>(sections.size()) != dim_space(m)) {
    throw std::invalid_argument("basis_type_divisor: wrong number of sections");
  }
  return BasisTypeDivisor{m, std::move(sections)};
}

QQ divisor_value_under(const NodalCubicModel& model, const MonomialValuation& v,
                       const BasisTypeDivisor& d, const DeepenPolicy& policy) {
  QQ total(0);
  for (const auto& s : d.sections) total += vweight(model, v, s, policy).v_t;
  return total / (QQ(d.m) * QQ(dim_space(d.m)));
}

QQ divisor_coefficient_of(const Form& g, const BasisTypeDivisor& d) {
  QQ total(0);
  for (const auto& s : d.sections) total += QQ(divisor_multiplicity(g, s));
  return total / (QQ(d.m) * QQ(dim_space(d.m)));
}

}  // namespace nks
