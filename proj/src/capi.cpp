#include "nodalkstab.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "nodalkstab/nodal_catalog.hpp"
#include "nodalkstab/scan.hpp"
#include "nodalkstab/section_ring.hpp"
#include "nodalkstab/verify.hpp"

using nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
nks_status wrap(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return NKS_EINVAL;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return NKS_EDOMAIN;
  } catch (const nks::TruncationExhausted& e) {
    g_last_error = e.what();
    return NKS_ETRUNC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NKS_EINTERNAL;
  }
}

nks_status emit(const std::string& text, char** out) {
  if (!out) {
    g_last_error = "null output pointer";
    return NKS_EINVAL;
  }
  *out = dup_string(text);
  if (!*out) {
    g_last_error = "allocation failure";
    return NKS_EINTERNAL;
  }
  return NKS_OK;
}

const nks::NodalCubicModel& model() {
  static const nks::NodalCubicModel m;
  return m;
}

ordered_json verdict_to_json(const nks::Verdict& v) {
  ordered_json j;
  j["t"] = nks::quad_to_string(v.t);
  j["fg"] = v.fg;
  j["fano"] = v.fano;
  if (v.piece) {
    j["piece"] = *v.piece;
  } else {
    j["piece"] = nullptr;
  }
  if (v.degeneration) {
    ordered_json d;
    d["kind"] = v.degeneration->kind == nks::Degeneration::Kind::weighted_plane
                    ? "weighted_plane"
                    : "weighted_hypersurface";
    ordered_json w = ordered_json::array();
    for (const auto& x : v.degeneration->weights) w.push_back(x.get_str());
    d["weights"] = std::move(w);
    if (!v.degeneration->exponents.empty()) {
      ordered_json e = ordered_json::array();
      for (const auto& x : v.degeneration->exponents) e.push_back(x.get_str());
      d["exponents"] = std::move(e);
    }
    d["display"] = v.degeneration->to_string();
    j["degeneration"] = std::move(d);
  } else {
    j["degeneration"] = nullptr;
  }
  j["reason"] = v.reason;
  j["provenance"] = v.provenance;
  return j;
}

}  // namespace

extern "C" {

const char* nks_version(void) { return "1.0.0"; }

const char* nks_last_error(void) { return g_last_error.c_str(); }

void nks_string_free(char* s) { std::free(s); }

nks_status nks_invariants(long a, long b, int max_curve, char** json_out) {
  return wrap([&]() -> nks_status {
    nks::InvariantRecord rec =
        nks::invariants_for(model(), a, b, max_curve > 0 ? max_curve : 4);
    ordered_json j;
    j["a"] = rec.a;
    j["b"] = rec.b;
    j["t"] = nks::qq_to_string(rec.t);
    j["A"] = nks::qq_to_string(rec.A);
    j["T"] = nks::qq_to_string(rec.T);
    j["epsilon"] = nks::qq_to_string(rec.epsilon);
    j["S"] = nks::qq_to_string(rec.S);
    ordered_json w;
    w["name"] = rec.witness_name;
    w["degree"] = rec.witness.degree;
    w["ord"] = rec.witness.ord;
    w["self_int"] = nks::qq_to_string(rec.witness.self_intersection);
    w["nef_boundary"] = rec.witness_nef_boundary;
    j["witness"] = std::move(w);
    j["provenance"] = rec.provenance;
    return emit(j.dump(2) + "\n", json_out);
  });
}

nks_status nks_s_exact(const char* t, char** value_out) {
  return wrap([&]() -> nks_status {
    if (!t) throw std::invalid_argument("null slope");
    nks::Quad value = nks::S_exact(nks::quad_from_string(t));
    return emit(nks::quad_to_string(value), value_out);
  });
}

nks_status nks_a_invariant(const char* t, char** value_out) {
  return wrap([&]() -> nks_status {
    if (!t) throw std::invalid_argument("null slope");
    nks::Quad value = nks::A_invariant(nks::quad_from_string(t));
    return emit(nks::quad_to_string(value), value_out);
  });
}

nks_status nks_classify(const char* t, char** json_out) {
  return wrap([&]() -> nks_status {
    if (!t) throw std::invalid_argument("null slope");
    nks::Verdict v = nks::classify(nks::quad_from_string(t));
    return emit(verdict_to_json(v).dump(2) + "\n", json_out);
  });
}

nks_status nks_dseq(int n, char** json_out) {
  return wrap([&]() -> nks_status {
    nks::DSequence seq = nks::d_sequence(n);
    nks::Breakpoints bp = nks::breakpoints(std::max(1, n - 1));
    ordered_json j;
    j["n"] = n;
    ordered_json d = ordered_json::array();
    for (const auto& x : seq.d) d.push_back(x.get_str());
    j["d"] = std::move(d);
    ordered_json t = ordered_json::array(), tp = ordered_json::array();
    for (const auto& x : bp.t) t.push_back(nks::qq_to_string(x));
    for (const auto& x : bp.tp) tp.push_back(nks::qq_to_string(x));
    j["t_breakpoints"] = std::move(t);
    j["t_prime"] = std::move(tp);
    return emit(j.dump(2) + "\n", json_out);
  });
}

nks_status nks_sm_table(long a, long b, int m_min, int m_max, char** csv_out) {
  return wrap([&]() -> nks_status {
    std::string csv = nks::sm_table_csv(model(), nks::MonomialValuation(a, b),
                                        m_min, m_max);
    return emit(csv, csv_out);
  });
}

nks_status nks_curve(int n, const char* format, char** out) {
  return wrap([&]() -> nks_status {
    std::string fmt = format ? format : "json";
    nks::SingularCurve dn = nks::construct_Dn(model(), n);
    if (fmt == "csv") {
      std::ostringstream os;
      os << "e0,e1,e2,coeff\n";
      for (const auto& [e, c] : dn.curve.terms()) {
        os << e[0] << ',' << e[1] << ',' << e[2] << ',' << nks::qq_to_string(c) << '\n';
      }
      return emit(os.str(), out);
    }
    if (fmt != "json") throw std::invalid_argument("curve format must be json or csv");
    ordered_json j;
    j["n"] = dn.n;
    j["degree"] = dn.degree;
    j["weights"] = ordered_json::array();
    {
      nks::DSequence seq = nks::d_sequence(dn.n + 1);
      j["weights"].push_back(seq.at(dn.n - 1).get_str());
      j["weights"].push_back(seq.at(dn.n + 1).get_str());
    }
    j["ord"] = dn.ord;
    ordered_json poly = ordered_json::array();
    for (const auto& v : dn.polygon) poly.push_back({v.i, v.j});
    j["newton_polygon"] = std::move(poly);
    j["solution_dim"] = dn.solution_dim;
    ordered_json coeffs = ordered_json::array();
    for (const auto& [e, c] : dn.curve.terms()) {
      ordered_json term;
      term["e"] = {e[0], e[1], e[2]};
      term["c"] = nks::qq_to_string(c);
      coeffs.push_back(std::move(term));
    }
    j["coefficients"] = std::move(coeffs);
    j["provenance"] = dn.provenance;
    return emit(j.dump(2) + "\n", out);
  });
}

struct nks_report {
  std::variant<nks::ScanReport, nks::DeltaReport> payload;
};

nks_status nks_scan_create(const char* t_min, const char* t_max, const char* step,
                           const char* mode, int m, int truncation_cap,
                           const char* cache_dir, int threads,
                           nks_report** report_out) {
  return wrap([&]() -> nks_status {
    if (!report_out) throw std::invalid_argument("null report output");
    if (!t_min || !t_max || !step) throw std::invalid_argument("null grid bounds");
    nks::ScanConfig cfg;
    cfg.t_min = nks::qq_from_string(t_min);
    cfg.t_max = nks::qq_from_string(t_max);
    cfg.step = nks::qq_from_string(step);
    std::string mode_s = mode ? mode : "exact";
    if (mode_s == "exact") {
      cfg.mode = nks::ScanMode::exact;
    } else if (mode_s == "sample") {
      cfg.mode = nks::ScanMode::sample;
    } else {
      throw std::invalid_argument("mode must be exact or sample");
    }
    cfg.m = m > 0 ? m : 1;
    cfg.truncation_cap = truncation_cap > 0 ? truncation_cap : 512;
    cfg.cache_dir = cache_dir ? cache_dir : "";
    cfg.threads = threads > 0 ? threads : 1;
    auto* handle = new nks_report{nks::scan(cfg)};
    *report_out = handle;
    return NKS_OK;
  });
}

nks_status nks_delta_create(const char* t_min, const char* t_max, const char* step,
                            const char* cache_dir, int threads,
                            nks_report** report_out) {
  return wrap([&]() -> nks_status {
    if (!report_out) throw std::invalid_argument("null report output");
    if (!t_min || !t_max || !step) throw std::invalid_argument("null grid bounds");
    nks::ScanConfig cfg;
    cfg.t_min = nks::qq_from_string(t_min);
    cfg.t_max = nks::qq_from_string(t_max);
    cfg.step = nks::qq_from_string(step);
    cfg.cache_dir = cache_dir ? cache_dir : "";
    cfg.threads = threads > 0 ? threads : 1;
    auto* handle = new nks_report{nks::delta_upper_bound(cfg)};
    *report_out = handle;
    return NKS_OK;
  });
}

nks_status nks_report_render(const nks_report* report, const char* format,
                             char** out) {
  return wrap([&]() -> nks_status {
    if (!report) throw std::invalid_argument("null report");
    std::string fmt = format ? format : "json";
    std::string text;
    if (const auto* s = std::get_if<nks::ScanReport>(&report->payload)) {
      if (fmt == "csv") {
        text = nks::to_csv(*s);
      } else if (fmt == "json") {
        text = nks::to_json(*s);
      } else if (fmt == "svg") {
        text = nks::to_svg(*s);
      } else {
        throw std::invalid_argument("format must be csv, json, or svg");
      }
    } else {
      const auto& d = std::get<nks::DeltaReport>(report->payload);
      if (fmt == "csv") {
        text = nks::to_csv(d);
      } else if (fmt == "json") {
        text = nks::to_json(d);
      } else {
        throw std::invalid_argument("delta reports render as csv or json");
      }
    }
    return emit(text, out);
  });
}

int nks_report_row_failures(const nks_report* report) {
  if (!report) return -1;
  if (const auto* s = std::get_if<nks::ScanReport>(&report->payload)) {
    return nks::row_failures(*s);
  }
  const auto& d = std::get<nks::DeltaReport>(report->payload);
  int n = 0;
  for (const auto& row : d.rows) n += row.failed ? 1 : 0;
  return n;
}

void nks_report_free(nks_report* report) { delete report; }

nks_status nks_verify_all(char** text_out, int* failures_out) {
  return wrap([&]() -> nks_status {
    auto results = nks::verify::run_acceptance();
    if (failures_out) *failures_out = nks::verify::count_failures(results);
    return emit(nks::verify::render_lines(results), text_out);
  });
}

}  // extern "C"
