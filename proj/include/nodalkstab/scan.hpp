#ifndef NODALKSTAB_SCAN_HPP
#define NODALKSTAB_SCAN_HPP

// Grid scanning of the S function with exact breakpoint detection (second
// differences over the grid, no tolerances), concavity checking, delta upper
// bounds, and deterministic report emission (CSV/JSON/SVG) with a JSON file
// cache keyed by a content hash of the configuration.

#include <optional>
#include <string>
#include <vector>

#include "nodalkstab/nodal_catalog.hpp"

namespace nks {

enum class ScanMode { exact, sample };

struct ScanConfig {
  QQ t_min;
  QQ t_max;
  QQ step;
  ScanMode mode = ScanMode::exact;
  int m = 1;                // sample mode level
  int truncation_cap = 512;
  std::string cache_dir;    // empty = no cache
  int threads = 1;

  void validate() const;
  std::string canonical_key() const;  // content-hash input (threads excluded)
};

struct ScanRow {
  QQ t;
  QQ A;
  QQ S;      // S_exact or S_m depending on mode
  QQ ratio;  // A/S
  bool failed = false;
  std::string flags;  // "ok", "breakpoint", "error:..."
};

// A breakpoint localized by the grid: a single nonzero second difference
// pins it at a grid point (`at`); a longer run only brackets it.
struct BreakpointHit {
  QQ lo;
  QQ hi;
  std::optional<QQ> at;
};

struct LinearPiece {
  QQ lo;
  QQ hi;
  QQ slope;
};

struct ScanReport {
  ScanConfig config;
  std::vector<ScanRow> rows;
  std::vector<BreakpointHit> breakpoints;
  std::vector<LinearPiece> pieces;
  std::vector<QQ> concavity_violations;  // grid points; must stay empty
  bool from_cache = false;
};

ScanReport scan(const ScanConfig& config);

struct DeltaReport {
  ScanConfig config;
  std::vector<ScanRow> rows;
  QQ min_ratio;
  std::vector<QQ> argmin;
  std::string note;
  bool from_cache = false;
};

// Exact-mode only: min of A/S over the grid; every sampled ratio is an upper
// bound for the stability threshold by definition of the infimum.
DeltaReport delta_upper_bound(const ScanConfig& config);

// Deterministic renderings. CSV columns: t,A,S,ratio,flags,S_decimal with
// exact text syntax plus a 12-digit decimal column; SVG is one S(t) polyline
// with circle markers at located breakpoints, viewBox 0 0 800 500.
std::string to_csv(const ScanReport& report);
std::string to_json(const ScanReport& report);
std::string to_svg(const ScanReport& report);

std::string to_csv(const DeltaReport& report);
std::string to_json(const DeltaReport& report);

ScanReport scan_report_from_json(const std::string& text);
DeltaReport delta_report_from_json(const std::string& text);

// write-temp-then-rename; creates parent directories.
void write_file_atomic(const std::string& path, const std::string& content);

uint64_t fnv1a64(const std::string& data);

int row_failures(const ScanReport& report);

}  // namespace nks

#endif  // NODALKSTAB_SCAN_HPP
