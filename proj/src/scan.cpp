#include "nodalkstab/scan.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "nodalkstab/section_ring.hpp"

namespace nks {

using ordered_json = nlohmann::ordered_json;

void ScanConfig::validate() const {
  if (!(t_min < t_max) && !(t_min == t_max)) {
    throw std::invalid_argument("scan config: t_min must be <= t_max");
  }
  if (step <= 0) throw std::invalid_argument("scan config: step must be positive");
  if (t_min <= 0) throw std::invalid_argument("scan config: grid must stay positive");
  if (mode == ScanMode::sample && m < 1) {
    throw std::invalid_argument("scan config: sample mode needs m >= 1");
  }
  if (truncation_cap < 4) throw std::invalid_argument("scan config: cap too small");
  if (threads < 1) throw std::invalid_argument("scan config: threads must be >= 1");
}

std::string ScanConfig::canonical_key() const {
  std::ostringstream os;
  os << "v1|" << qq_to_string(t_min) << "|" << qq_to_string(t_max) << "|"
     << qq_to_string(step) << "|" << (mode == ScanMode::exact ? "exact" : "sample")
     << "|" << (mode == ScanMode::sample ? m : 0) << "|" << truncation_cap;
  return os.str();
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::vector<QQ> grid_points(const ScanConfig& cfg) {
  std::vector<QQ> pts;
  for (QQ t = cfg.t_min; t <= cfg.t_max; t += cfg.step) pts.push_back(t);
  return pts;
}

ScanRow compute_row(const ScanConfig& cfg, const QQ& t) {
  ScanRow row;
  row.t = t;
  row.A = QQ(1) + t;
  try {
    if (cfg.mode == ScanMode::exact) {
      Quad s = S_exact(Quad(t));
      if (!s.is_rational()) throw std::logic_error("exact S irrational on rational grid");
      row.S = s.p;
    } else {
      static const NodalCubicModel model;
      DeepenPolicy policy;
      policy.hard_cap = cfg.truncation_cap;
      MonomialValuation v(t.get_den().get_si(), t.get_num().get_si());
      row.S = S_m(model, v, cfg.m, policy);
    }
    row.ratio = row.A / row.S;
    row.flags = "ok";
  } catch (const TruncationExhausted& e) {
    row.failed = true;
    row.flags = std::string("error:truncation-exhausted");
  }
  return row;
}

// Rows in parallel, aggregation in grid order.
std::vector<ScanRow> compute_rows(const ScanConfig& cfg) {
  std::vector<QQ> pts = grid_points(cfg);
  std::vector<ScanRow> rows(pts.size());
  if (cfg.threads <= 1 || pts.size() < 2) {
    for (size_t k = 0; k < pts.size(); ++k) rows[k] = compute_row(cfg, pts[k]);
    return rows;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t k = next.fetch_add(1);
      if (k >= pts.size()) return;
      rows[k] = compute_row(cfg, pts[k]);
    }
  };
  std::vector<std::future<void>> futs;
  int nthreads = std::min<int>(cfg.threads, static_cast<int>(pts.size()));
  futs.reserve(nthreads);
  for (int k = 0; k < nthreads; ++k) {
    futs.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : futs) f.get();
  return rows;
}

// Exact second-difference analysis over maximal runs of non-failed rows.
void analyze(ScanReport& report) {
  const auto& rows = report.rows;
  const QQ& h = report.config.step;
  size_t n = rows.size();
  size_t start = 0;
  while (start < n) {
    while (start < n && rows[start].failed) ++start;
    size_t end = start;
    while (end < n && !rows[end].failed) ++end;
    // Segment [start, end); needs >= 3 points for second differences.
    if (end - start >= 3) {
      std::vector<bool> nonzero(n, false);
      for (size_t k = start + 1; k + 1 < end; ++k) {
        QQ dd = rows[k - 1].S - 2 * rows[k].S + rows[k + 1].S;
        if (dd > 0) report.concavity_violations.push_back(rows[k].t);
        nonzero[k] = (dd != 0);
      }
      // Breakpoints: maximal runs of nonzero second differences.
      size_t k = start + 1;
      while (k + 1 < end) {
        if (!nonzero[k]) {
          ++k;
          continue;
        }
        size_t run_end = k;
        while (run_end + 1 + 1 < end && nonzero[run_end + 1]) ++run_end;
        BreakpointHit hit;
        hit.lo = rows[k - 1].t;
        hit.hi = rows[run_end + 1].t;
        if (run_end == k) hit.at = rows[k].t;
        report.breakpoints.push_back(hit);
        k = run_end + 1;
      }
      // Linear pieces: maximal subintervals with vanishing second differences
      // in their interior.
      size_t piece_start = start;
      for (size_t cut = start + 1; cut < end; ++cut) {
        bool is_cut = (cut + 1 < end) ? nonzero[cut] : true;
        if (cut + 1 == end) is_cut = true;  // close the final piece
        if (!is_cut) continue;
        if (cut > piece_start) {
          LinearPiece piece;
          piece.lo = rows[piece_start].t;
          piece.hi = rows[cut].t;
          piece.slope = (rows[piece_start + 1].S - rows[piece_start].S) / h;
          report.pieces.push_back(piece);
        }
        piece_start = cut;
      }
    }
    start = end;
  }
}

std::string cache_path(const ScanConfig& cfg, const std::string& kind) {
  uint64_t h = fnv1a64(kind + ":" + cfg.canonical_key());
  std::ostringstream os;
  os << cfg.cache_dir << "/" << kind << "-" << std::hex << h << ".json";
  return os.str();
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void mark_breakpoint_rows(ScanReport& report) {
  for (const auto& hit : report.breakpoints) {
    if (!hit.at) continue;
    for (auto& row : report.rows) {
      if (row.t == *hit.at && !row.failed) row.flags = "breakpoint";
    }
  }
}

}  // namespace

ScanReport scan(const ScanConfig& config) {
  config.validate();
  if (!config.cache_dir.empty()) {
    auto cached = read_file(cache_path(config, "scan"));
    if (cached) {
      ScanReport report = scan_report_from_json(*cached);
      report.config.cache_dir = config.cache_dir;
      report.config.threads = config.threads;
      report.from_cache = true;
      return report;
    }
  }
  ScanReport report;
  report.config = config;
  report.rows = compute_rows(config);
  analyze(report);
  mark_breakpoint_rows(report);
  if (!config.cache_dir.empty()) {
    write_file_atomic(cache_path(config, "scan"), to_json(report));
  }
  return report;
}

DeltaReport delta_upper_bound(const ScanConfig& config) {
  config.validate();
  if (config.mode != ScanMode::exact) {
    throw std::invalid_argument("delta_upper_bound: exact mode only");
  }
  if (!config.cache_dir.empty()) {
    auto cached = read_file(cache_path(config, "delta"));
    if (cached) {
      DeltaReport report = delta_report_from_json(*cached);
      report.config.cache_dir = config.cache_dir;
      report.config.threads = config.threads;
      report.from_cache = true;
      return report;
    }
  }
  DeltaReport report;
  report.config = config;
  report.rows = compute_rows(config);
  bool first = true;
  for (const auto& row : report.rows) {
    if (row.failed) continue;
    if (first || row.ratio < report.min_ratio) {
      report.min_ratio = row.ratio;
      first = false;
    }
  }
  if (first) throw std::runtime_error("delta_upper_bound: no usable rows");
  for (auto& row : report.rows) {
    if (!row.failed && row.ratio == report.min_ratio) {
      report.argmin.push_back(row.t);
      row.flags = "argmin";
    }
  }
  report.note =
      "each sampled A/S is an upper bound for the stability threshold; the "
      "reported minimum is the best bound on this grid";
  if (!config.cache_dir.empty()) {
    write_file_atomic(cache_path(config, "delta"), to_json(report));
  }
  return report;
}

// --- rendering -------------------------------------------------------------

namespace {

constexpr int kDecimalDigits = 12;

void append_row_csv(std::ostringstream& os, const ScanRow& row) {
  os << qq_to_string(row.t) << ',';
  if (row.failed) {
    os << ",,," << row.flags << ",\n";
    return;
  }
  os << qq_to_string(row.A) << ',' << qq_to_string(row.S) << ','
     << qq_to_string(row.ratio) << ',' << row.flags << ','
     << qq_to_decimal(row.S, kDecimalDigits) << '\n';
}

ordered_json config_to_json(const ScanConfig& cfg) {
  ordered_json j;
  j["t_min"] = qq_to_string(cfg.t_min);
  j["t_max"] = qq_to_string(cfg.t_max);
  j["step"] = qq_to_string(cfg.step);
  j["mode"] = cfg.mode == ScanMode::exact ? "exact" : "sample";
  j["m"] = cfg.m;
  j["truncation_cap"] = cfg.truncation_cap;
  return j;
}

ScanConfig config_from_json(const ordered_json& j) {
  ScanConfig cfg;
  cfg.t_min = qq_from_string(j.at("t_min").get<std::string>());
  cfg.t_max = qq_from_string(j.at("t_max").get<std::string>());
  cfg.step = qq_from_string(j.at("step").get<std::string>());
  cfg.mode = j.at("mode").get<std::string>() == "exact" ? ScanMode::exact
                                                        : ScanMode::sample;
  cfg.m = j.at("m").get<int>();
  cfg.truncation_cap = j.at("truncation_cap").get<int>();
  return cfg;
}

ordered_json rows_to_json(const std::vector<ScanRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["t"] = qq_to_string(row.t);
    if (row.failed) {
      r["error"] = row.flags;
    } else {
      r["A"] = qq_to_string(row.A);
      r["S"] = qq_to_string(row.S);
      r["ratio"] = qq_to_string(row.ratio);
      r["flags"] = row.flags;
    }
    arr.push_back(std::move(r));
  }
  return arr;
}

std::vector<ScanRow> rows_from_json(const ordered_json& arr) {
  std::vector<ScanRow> rows;
  for (const auto& r : arr) {
    ScanRow row;
    row.t = qq_from_string(r.at("t").get<std::string>());
    if (r.contains("error")) {
      row.failed = true;
      row.flags = r.at("error").get<std::string>();
    } else {
      row.A = qq_from_string(r.at("A").get<std::string>());
      row.S = qq_from_string(r.at("S").get<std::string>());
      row.ratio = qq_from_string(r.at("ratio").get<std::string>());
      row.flags = r.at("flags").get<std::string>();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double approx(const QQ& x) { return x.get_d(); }

}  // namespace

std::string to_csv(const ScanReport& report) {
  std::ostringstream os;
  os << "t,A,S,ratio,flags,S_decimal\n";
  for (const auto& row : report.rows) append_row_csv(os, row);
  return os.str();
}

std::string to_csv(const DeltaReport& report) {
  std::ostringstream os;
  os << "t,A,S,ratio,flags,S_decimal\n";
  for (const auto& row : report.rows) append_row_csv(os, row);
  return os.str();
}

std::string to_json(const ScanReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "scan";
  j["config"] = config_to_json(report.config);
  j["rows"] = rows_to_json(report.rows);
  ordered_json bps = ordered_json::array();
  for (const auto& hit : report.breakpoints) {
    ordered_json b;
    b["lo"] = qq_to_string(hit.lo);
    b["hi"] = qq_to_string(hit.hi);
    if (hit.at) b["at"] = qq_to_string(*hit.at);
    bps.push_back(std::move(b));
  }
  j["breakpoints"] = std::move(bps);
  ordered_json pieces = ordered_json::array();
  for (const auto& piece : report.pieces) {
    ordered_json p;
    p["lo"] = qq_to_string(piece.lo);
    p["hi"] = qq_to_string(piece.hi);
    p["slope"] = qq_to_string(piece.slope);
    pieces.push_back(std::move(p));
  }
  j["linear_pieces"] = std::move(pieces);
  ordered_json viol = ordered_json::array();
  for (const auto& t : report.concavity_violations) viol.push_back(qq_to_string(t));
  j["concavity_violations"] = std::move(viol);
  return j.dump(2) + "\n";
}

std::string to_json(const DeltaReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "delta";
  j["config"] = config_to_json(report.config);
  j["rows"] = rows_to_json(report.rows);
  j["min_ratio"] = qq_to_string(report.min_ratio);
  ordered_json argmin = ordered_json::array();
  for (const auto& t : report.argmin) argmin.push_back(qq_to_string(t));
  j["argmin"] = std::move(argmin);
  j["note"] = report.note;
  return j.dump(2) + "\n";
}

ScanReport scan_report_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (j.at("schema_version").get<int>() != 1 || j.at("kind") != "scan") {
    throw std::invalid_argument("unrecognized scan report JSON");
  }
  ScanReport report;
  report.config = config_from_json(j.at("config"));
  report.rows = rows_from_json(j.at("rows"));
  for (const auto& b : j.at("breakpoints")) {
    BreakpointHit hit;
    hit.lo = qq_from_string(b.at("lo").get<std::string>());
    hit.hi = qq_from_string(b.at("hi").get<std::string>());
    if (b.contains("at")) hit.at = qq_from_string(b.at("at").get<std::string>());
    report.breakpoints.push_back(std::move(hit));
  }
  for (const auto& p : j.at("linear_pieces")) {
    LinearPiece piece;
    piece.lo = qq_from_string(p.at("lo").get<std::string>());
    piece.hi = qq_from_string(p.at("hi").get<std::string>());
    piece.slope = qq_from_string(p.at("slope").get<std::string>());
    report.pieces.push_back(std::move(piece));
  }
  for (const auto& t : j.at("concavity_violations")) {
    report.concavity_violations.push_back(qq_from_string(t.get<std::string>()));
  }
  return report;
}

DeltaReport delta_report_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (j.at("schema_version").get<int>() != 1 || j.at("kind") != "delta") {
    throw std::invalid_argument("unrecognized delta report JSON");
  }
  DeltaReport report;
  report.config = config_from_json(j.at("config"));
  report.rows = rows_from_json(j.at("rows"));
  report.min_ratio = qq_from_string(j.at("min_ratio").get<std::string>());
  for (const auto& t : j.at("argmin")) {
    report.argmin.push_back(qq_from_string(t.get<std::string>()));
  }
  report.note = j.at("note").get<std::string>();
  return report;
}

std::string to_svg(const ScanReport& report) {
  // Plot frame: x in [40, 780], y in [40, 460], y axis inverted. The doubles
  // here are presentation only; every decision in the report stays exact.
  std::vector<const ScanRow*> good;
  for (const auto& row : report.rows) {
    if (!row.failed) good.push_back(&row);
  }
  double tmin = approx(report.config.t_min), tmax = approx(report.config.t_max);
  double smin = 0, smax = 1;
  if (!good.empty()) {
    smin = approx(good.front()->S);
    smax = smin;
    for (const auto* row : good) {
      smin = std::min(smin, approx(row->S));
      smax = std::max(smax, approx(row->S));
    }
  }
  if (smax - smin < 1e-9) smax = smin + 1;
  if (tmax - tmin < 1e-9) tmax = tmin + 1;
  auto px = [&](double t) { return 40.0 + (t - tmin) / (tmax - tmin) * 740.0; };
  auto py = [&](double s) { return 460.0 - (s - smin) / (smax - smin) * 420.0; };
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (size_t k = 0; k < good.size(); ++k) {
    if (k) os << ' ';
    os << fmt(px(approx(good[k]->t))) << ',' << fmt(py(approx(good[k]->S)));
  }
  os << "\"/>\n";
  for (const auto& hit : report.breakpoints) {
    QQ tq = hit.at ? *hit.at : (hit.lo + hit.hi) / 2;
    const ScanRow* nearest = nullptr;
    QQ best_gap(0);
    for (const auto* row : good) {
      QQ gap = abs(row->t - tq);
      if (!nearest || gap < best_gap) {
        nearest = row;
        best_gap = gap;
      }
    }
    if (!nearest) continue;
    os << "  <circle cx=\"" << fmt(px(approx(tq))) << "\" cy=\""
       << fmt(py(approx(nearest->S)))
       << "\" r=\"5\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory for '" + path + "'");
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("rename failed for '" + path + "': " + ec.message());
}

int row_failures(const ScanReport& report) {
  int n = 0;
  for (const auto& row : report.rows) n += row.failed ? 1 : 0;
  return n;
}

}  // namespace nks
