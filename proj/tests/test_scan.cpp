#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "nodalkstab/scan.hpp"

using namespace nks;

namespace {

ScanConfig base_config() {
  ScanConfig cfg;
  cfg.t_min = QQ(1);
  cfg.t_max = QQ(13, 2);
  cfg.step = QQ(1, 4);
  return cfg;
}

}  // namespace

TEST_CASE("exact scan of [1, 13/2] finds the two breakpoints and three slopes") {
  ScanReport report = scan(base_config());
  REQUIRE(report.breakpoints.size() == 2);
  CHECK(report.breakpoints[0].at);
  CHECK(*report.breakpoints[0].at == QQ(2));
  CHECK(report.breakpoints[1].at);
  CHECK(*report.breakpoints[1].at == QQ(5));
  REQUIRE(report.pieces.size() == 3);
  CHECK(report.pieces[0].slope == QQ(1));
  CHECK(report.pieces[1].slope == QQ(1, 2));
  CHECK(report.pieces[2].slope == QQ(2, 5));
  CHECK(report.pieces[0].lo == QQ(1));
  CHECK(report.pieces[0].hi == QQ(2));
  CHECK(report.pieces[2].hi == QQ(13, 2));
  CHECK(report.concavity_violations.empty());
  CHECK(row_failures(report) == 0);
}

TEST_CASE("single-piece scan reports no breakpoints and no violations") {
  ScanConfig cfg;
  cfg.t_min = QQ(1);
  cfg.t_max = QQ(2);
  cfg.step = QQ(1, 8);
  ScanReport report = scan(cfg);
  CHECK(report.breakpoints.empty());
  CHECK(report.concavity_violations.empty());
  REQUIRE(report.pieces.size() == 1);
  CHECK(report.pieces[0].slope == QQ(1));
}

TEST_CASE("sample scan at m=1 satisfies the concavity inequality at 3/2") {
  ScanConfig cfg;
  cfg.t_min = QQ(1);
  cfg.t_max = QQ(2);
  cfg.step = QQ(1, 2);
  cfg.mode = ScanMode::sample;
  cfg.m = 1;
  ScanReport report = scan(cfg);
  REQUIRE(report.rows.size() == 3);
  const QQ& s_mid = report.rows[1].S;
  CHECK(QQ(2) * s_mid >= report.rows[0].S + report.rows[2].S);
  CHECK(report.concavity_violations.empty());
}

TEST_CASE("scan grid honors exact endpoints") {
  ScanConfig cfg;
  cfg.t_min = QQ(1, 2);
  cfg.t_max = QQ(3, 2);
  cfg.step = QQ(1, 3);
  ScanReport report = scan(cfg);
  REQUIRE(report.rows.size() == 4);  // 1/2, 5/6, 7/6, 3/2
  CHECK(report.rows.back().t == QQ(3, 2));
}

TEST_CASE("csv output is byte-deterministic and parallel-stable") {
  std::string one = to_csv(scan(base_config()));
  std::string two = to_csv(scan(base_config()));
  CHECK(one == two);
  ScanConfig par = base_config();
  par.threads = 4;
  CHECK(to_csv(scan(par)) == one);
  // header + schema
  CHECK(one.substr(0, one.find('\n')) == "t,A,S,ratio,flags,S_decimal");
}

TEST_CASE("json round trip preserves the report structurally") {
  ScanReport report = scan(base_config());
  ScanReport back = scan_report_from_json(to_json(report));
  REQUIRE(back.rows.size() == report.rows.size());
  for (size_t k = 0; k < report.rows.size(); ++k) {
    REQUIRE(back.rows[k].t == report.rows[k].t);
    REQUIRE(back.rows[k].S == report.rows[k].S);
    REQUIRE(back.rows[k].flags == report.rows[k].flags);
  }
  REQUIRE(back.breakpoints.size() == report.breakpoints.size());
  REQUIRE(back.pieces.size() == report.pieces.size());
  CHECK(to_csv(back) == to_csv(report));
}

TEST_CASE("cache round trip produces identical bytes and marks cache hits") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "nks-test-cache";
  std::error_code ec;
  fs::remove_all(dir, ec);
  ScanConfig cfg = base_config();
  cfg.cache_dir = dir.string();
  ScanReport first = scan(cfg);
  CHECK_FALSE(first.from_cache);
  ScanReport second = scan(cfg);
  CHECK(second.from_cache);
  CHECK(to_csv(first) == to_csv(second));
  CHECK(to_json(first) == to_json(second));
  fs::remove_all(dir, ec);
}

TEST_CASE("svg has the polyline and exactly the located breakpoint markers") {
  ScanReport report = scan(base_config());
  std::string svg = to_svg(report);
  CHECK(svg.find("viewBox=\"0 0 800 500\"") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  size_t markers = 0;
  for (size_t pos = svg.find("<circle"); pos != std::string::npos;
       pos = svg.find("<circle", pos + 1)) {
    ++markers;
  }
  CHECK(markers == 2);
}

TEST_CASE("grid linearity agrees with the classifier's verdicts") {
  // Inside the window every rational grid point is finitely generated and the
  // scan sees honest linear pieces; beyond it, S is a genuine rational
  // function, every interior second difference is a nonlinearity witness, and
  // nearby irrational slopes are the non-finitely-generated ones.
  ScanReport inside = scan(base_config());
  for (const auto& row : inside.rows) {
    Verdict v = classify(Quad(row.t));
    REQUIRE(v.fg);
    bool in_piece = false;
    for (const auto& piece : inside.pieces) {
      if (piece.lo <= row.t && row.t <= piece.hi) in_piece = true;
    }
    REQUIRE(in_piece);
  }

  ScanConfig beyond;
  beyond.t_min = QQ(7);
  beyond.t_max = QQ(8);
  beyond.step = QQ(1, 8);
  ScanReport curved = scan(beyond);
  CHECK(curved.concavity_violations.empty());
  for (const auto& piece : curved.pieces) {
    REQUIRE(piece.hi - piece.lo == beyond.step);  // no multi-step linear run
  }
  for (const auto& row : curved.rows) {
    REQUIRE(classify(Quad(row.t)).fg);  // rational slopes stay fg
  }
  CHECK_FALSE(classify(Quad(QQ(7), QQ(1, 8))).fg);  // 7 + sqrt5/8 is not
}

TEST_CASE("delta report over [1/2, 13/2]") {
  ScanConfig cfg;
  cfg.t_min = QQ(1, 2);
  cfg.t_max = QQ(13, 2);
  cfg.step = QQ(1, 4);
  DeltaReport report = delta_upper_bound(cfg);
  CHECK(report.min_ratio == QQ(1));
  for (const auto& row : report.rows) REQUIRE(row.ratio >= QQ(1));
  REQUIRE_FALSE(report.argmin.empty());
  CHECK(report.argmin.front() == QQ(1, 2));
  CHECK(report.argmin.back() == QQ(2));
}

TEST_CASE("delta at t=7 and on a one-point grid") {
  ScanConfig cfg;
  cfg.t_min = QQ(7);
  cfg.t_max = QQ(7);
  cfg.step = QQ(1);
  DeltaReport report = delta_upper_bound(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.min_ratio == QQ(192, 127));  // 8 / (127/24)

  ScanConfig single;
  single.t_min = QQ(1);
  single.t_max = QQ(1);
  single.step = QQ(1);
  CHECK(delta_upper_bound(single).min_ratio == QQ(1));
}

TEST_CASE("delta requires exact mode") {
  ScanConfig cfg = base_config();
  cfg.mode = ScanMode::sample;
  CHECK_THROWS_AS(delta_upper_bound(cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
  ScanConfig bad = base_config();
  bad.step = QQ(0);
  CHECK_THROWS_AS(scan(bad), std::invalid_argument);
  ScanConfig inverted = base_config();
  inverted.t_min = QQ(3);
  inverted.t_max = QQ(2);
  CHECK_THROWS_AS(scan(inverted), std::invalid_argument);
  ScanConfig nonpositive = base_config();
  nonpositive.t_min = QQ(-1);
  CHECK_THROWS_AS(scan(nonpositive), std::invalid_argument);
}

TEST_CASE("atomic writes land complete files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "nks-test-atomic";
  std::error_code ec;
  fs::remove_all(dir, ec);
  std::string path = (dir / "a" / "b.txt").string();
  write_file_atomic(path, "payload");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "payload");
  fs::remove_all(dir, ec);
}
