// Exercises the extern "C" surface the CLI is built on.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <string>

#include "nodalkstab.h"

using nlohmann::json;

namespace {

struct Str {
  char* s = nullptr;
  ~Str() { nks_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

}  // namespace

TEST_CASE("s-exact and A through the C API") {
  Str v;
  REQUIRE(nks_s_exact("7", &v.s) == NKS_OK);
  CHECK(v.str() == "127/24");
  Str a;
  REQUIRE(nks_a_invariant("1/2", &a.s) == NKS_OK);
  CHECK(a.str() == "3/2");
  Str quad;
  REQUIRE(nks_s_exact("7/2+3/2*sqrt5", &quad.s) == NKS_OK);
  CHECK(quad.str() == "3+1*sqrt5");
}

TEST_CASE("error paths set codes and messages") {
  Str v;
  CHECK(nks_s_exact("0", &v.s) == NKS_EDOMAIN);
  CHECK(std::string(nks_last_error()).find("positive") != std::string::npos);
  CHECK(nks_s_exact("not-a-number", &v.s) == NKS_EINVAL);
  CHECK(nks_s_exact(nullptr, &v.s) == NKS_EINVAL);
  CHECK(nks_invariants(2, 4, 0, &v.s) == NKS_EINVAL);  // not coprime
}

TEST_CASE("invariants record as JSON") {
  Str out;
  REQUIRE(nks_invariants(1, 7, 0, &out.s) == NKS_OK);
  json j = json::parse(out.str());
  CHECK(j["a"] == 1);
  CHECK(j["b"] == 7);
  CHECK(j["t"] == "7");
  CHECK(j["A"] == "8");
  CHECK(j["T"] == "8");
  CHECK(j["epsilon"] == "63/8");
  CHECK(j["S"] == "127/24");
  CHECK(j["witness"]["name"] == "C");
  CHECK(j["witness"]["degree"] == 3);
  CHECK(j["witness"]["ord"] == 8);
  CHECK(j["witness"]["self_int"] == "-1/7");
}

TEST_CASE("classify verdict as JSON") {
  Str out;
  REQUIRE(nks_classify("5", &out.s) == NKS_OK);
  json j = json::parse(out.str());
  CHECK(j["fg"] == true);
  CHECK(j["fano"] == true);
  CHECK(j["piece"] == 2);
  CHECK(j["degeneration"]["kind"] == "weighted_hypersurface");
  CHECK(j["degeneration"]["display"] == "x0*x3 = x1^5 + x2 in P(1,1,5,4)");

  Str out2;
  REQUIRE(nks_classify("7+1*sqrt5", &out2.s) == NKS_OK);
  json j2 = json::parse(out2.str());
  CHECK(j2["fg"] == false);
  CHECK(j2["fano"] == false);
}

TEST_CASE("dseq and curve endpoints") {
  Str out;
  REQUIRE(nks_dseq(6, &out.s) == NKS_OK);
  json j = json::parse(out.str());
  CHECK(j["d"] == json({"1", "1", "2", "5", "13", "34", "89"}));
  CHECK(j["t_breakpoints"][1] == "2");
  CHECK(j["t_breakpoints"][2] == "5");

  Str curve;
  REQUIRE(nks_curve(1, "csv", &curve.s) == NKS_OK);
  CHECK(curve.str() == "e0,e1,e2,coeff\n0,0,1,1\n0,1,0,1\n");

  Str curve_json;
  REQUIRE(nks_curve(2, "json", &curve_json.s) == NKS_OK);
  json jc = json::parse(curve_json.str());
  CHECK(jc["degree"] == 2);
  CHECK(jc["ord"] == 5);
  CHECK(jc["solution_dim"] == 1);
}

TEST_CASE("finite-level table endpoint") {
  Str csv;
  REQUIRE(nks_sm_table(1, 1, 1, 2, &csv.s) == NKS_OK);
  CHECK(csv.str() ==
        "a,b,t,m,N_m,S_m,T_m\n"
        "1,1,1,1,10,2,3\n"
        "1,1,1,2,28,2,6\n");
  CHECK(nks_sm_table(2, 4, 1, 2, &csv.s) == NKS_EINVAL);
}

TEST_CASE("scan report handle lifecycle") {
  nks_report* report = nullptr;
  REQUIRE(nks_scan_create("1", "13/2", "1/4", "exact", 0, 0, "", 2, &report) == NKS_OK);
  REQUIRE(report != nullptr);
  CHECK(nks_report_row_failures(report) == 0);

  Str csv;
  REQUIRE(nks_report_render(report, "csv", &csv.s) == NKS_OK);
  CHECK(csv.str().rfind("t,A,S,ratio,flags,S_decimal\n", 0) == 0);

  Str jtext;
  REQUIRE(nks_report_render(report, "json", &jtext.s) == NKS_OK);
  json j = json::parse(jtext.str());
  CHECK(j["schema_version"] == 1);
  CHECK(j["breakpoints"].size() == 2);
  CHECK(j["breakpoints"][0]["at"] == "2");
  CHECK(j["concavity_violations"].empty());

  Str svg;
  REQUIRE(nks_report_render(report, "svg", &svg.s) == NKS_OK);
  CHECK(svg.str().find("<svg") != std::string::npos);

  Str bad;
  CHECK(nks_report_render(report, "yaml", &bad.s) == NKS_EINVAL);
  nks_report_free(report);
}

TEST_CASE("delta report handle") {
  nks_report* report = nullptr;
  REQUIRE(nks_delta_create("1/2", "13/2", "1/4", "", 1, &report) == NKS_OK);
  Str jtext;
  REQUIRE(nks_report_render(report, "json", &jtext.s) == NKS_OK);
  json j = json::parse(jtext.str());
  CHECK(j["kind"] == "delta");
  CHECK(j["min_ratio"] == "1");
  Str svg;
  CHECK(nks_report_render(report, "svg", &svg.s) == NKS_EINVAL);
  nks_report_free(report);
}

TEST_CASE("usage errors from scan creation") {
  nks_report* report = nullptr;
  CHECK(nks_scan_create("2", "1", "1/4", "exact", 0, 0, "", 1, &report) == NKS_EINVAL);
  CHECK(nks_scan_create("1", "2", "1/4", "fancy", 0, 0, "", 1, &report) == NKS_EINVAL);
  CHECK(nks_scan_create(nullptr, "2", "1/4", "exact", 0, 0, "", 1, &report) == NKS_EINVAL);
}
