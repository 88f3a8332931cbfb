// Command-line front end. Talks to the library exclusively through the C API
// in nodalkstab.h; all exact computation lives behind that boundary.
//
// Exit codes: 0 success, 1 usage errors, 2 per-row or verification failures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "nodalkstab.h"

namespace {

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { nks_string_free(s); }
};

struct ReportGuard {
  nks_report* r = nullptr;
  ~ReportGuard() { nks_report_free(r); }
};

int fail_with(nks_status status) {
  std::cerr << "error: " << nks_last_error() << "\n";
  switch (status) {
    case NKS_EINVAL:
    case NKS_EDOMAIN:
      return 1;
    default:
      return 2;
  }
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return 2;
  }
  out << text;
  return out ? 0 : 2;
}

std::string default_cache_dir() {
  const char* env = std::getenv("NKS_CACHE_DIR");
  return env ? env : "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact K-stability invariants of monomial valuations at the node "
               "of the nodal plane cubic"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path;
  std::string cache_dir = default_cache_dir();
  std::string format = "json";
  int jobs = 1;
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--cache-dir", cache_dir,
                 "Report cache directory (default $NKS_CACHE_DIR)");
  app.add_option("--format", format, "Output format: csv|json|svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--jobs", jobs, "Worker threads for scans")->check(CLI::PositiveNumber);

  // invariants --a A --b B
  auto* cmd_inv = app.add_subcommand("invariants", "Blowup invariants for weights (a,b)");
  long opt_a = 1, opt_b = 1;
  int max_curve = 4;
  cmd_inv->add_option("--a", opt_a, "First weight (on z)")->required();
  cmd_inv->add_option("--b", opt_b, "Second weight (on w)")->required();
  cmd_inv->add_option("--max-curve", max_curve, "Largest witness curve index");

  // s-exact --t T
  auto* cmd_s = app.add_subcommand("s-exact", "Exact S at a slope");
  std::string opt_t;
  cmd_s->add_option("--t", opt_t, "Slope (p/q or p/q+r/s*sqrt5)")->required();

  // classify --t T
  auto* cmd_classify = app.add_subcommand("classify", "Finite-generation verdict");
  std::string classify_t;
  cmd_classify->add_option("--t", classify_t, "Slope")->required();

  // dseq --n N
  auto* cmd_dseq = app.add_subcommand("dseq", "The degree sequence and breakpoints");
  int dseq_n = 6;
  cmd_dseq->add_option("--n", dseq_n, "Largest index")->required();

  // sm-table --a A --b B --m-min --m-max
  auto* cmd_table = app.add_subcommand("sm-table", "Finite-level S_m/T_m table as CSV");
  long table_a = 1, table_b = 1;
  int m_min = 1, m_max = 4;
  cmd_table->add_option("--a", table_a, "First weight")->required();
  cmd_table->add_option("--b", table_b, "Second weight")->required();
  cmd_table->add_option("--m-min", m_min, "Smallest level");
  cmd_table->add_option("--m-max", m_max, "Largest level");

  // curve --n N
  auto* cmd_curve = app.add_subcommand("curve", "The singular curve D_n");
  int curve_n = 1;
  cmd_curve->add_option("--n", curve_n, "Curve index")->required();

  // scan
  auto* cmd_scan = app.add_subcommand("scan", "Scan S over a slope grid");
  std::string t_min, t_max, step, mode = "exact";
  int sample_m = 1, cap = 512;
  cmd_scan->add_option("--t-min", t_min, "Grid start")->required();
  cmd_scan->add_option("--t-max", t_max, "Grid end")->required();
  cmd_scan->add_option("--step", step, "Grid step")->required();
  cmd_scan->add_option("--mode", mode, "exact|sample")
      ->check(CLI::IsMember({"exact", "sample"}));
  cmd_scan->add_option("--m", sample_m, "Level for sample mode");
  cmd_scan->add_option("--cap", cap, "Truncation cap");

  // delta
  auto* cmd_delta = app.add_subcommand("delta", "Upper bounds for the stability threshold");
  std::string d_min, d_max, d_step;
  cmd_delta->add_option("--t-min", d_min, "Grid start")->required();
  cmd_delta->add_option("--t-max", d_max, "Grid end")->required();
  cmd_delta->add_option("--step", d_step, "Grid step")->required();

  // verify-all
  auto* cmd_verify = app.add_subcommand("verify-all", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  if (cmd_inv->parsed()) {
    StringGuard json;
    nks_status st = nks_invariants(opt_a, opt_b, max_curve, &json.s);
    if (st != NKS_OK) return fail_with(st);
    return write_output(json.s, out_path);
  }

  if (cmd_s->parsed()) {
    StringGuard value;
    nks_status st = nks_s_exact(opt_t.c_str(), &value.s);
    if (st != NKS_OK) return fail_with(st);
    if (format == "json") {
      StringGuard a_value;
      if (nks_a_invariant(opt_t.c_str(), &a_value.s) != NKS_OK) return fail_with(st);
      std::string json = std::string("{\n  \"t\": \"") + opt_t + "\",\n  \"S\": \"" +
                         value.s + "\",\n  \"A\": \"" + a_value.s + "\"\n}\n";
      return write_output(json, out_path);
    }
    return write_output(std::string(value.s) + "\n", out_path);
  }

  if (cmd_classify->parsed()) {
    StringGuard json;
    nks_status st = nks_classify(classify_t.c_str(), &json.s);
    if (st != NKS_OK) return fail_with(st);
    return write_output(json.s, out_path);
  }

  if (cmd_dseq->parsed()) {
    StringGuard json;
    nks_status st = nks_dseq(dseq_n, &json.s);
    if (st != NKS_OK) return fail_with(st);
    return write_output(json.s, out_path);
  }

  if (cmd_table->parsed()) {
    StringGuard csv;
    nks_status st = nks_sm_table(table_a, table_b, m_min, m_max, &csv.s);
    if (st != NKS_OK) return fail_with(st);
    return write_output(csv.s, out_path);
  }

  if (cmd_curve->parsed()) {
    StringGuard text;
    nks_status st = nks_curve(curve_n, format == "csv" ? "csv" : "json", &text.s);
    if (st != NKS_OK) return fail_with(st);
    return write_output(text.s, out_path);
  }

  if (cmd_scan->parsed()) {
    ReportGuard report;
    nks_status st = nks_scan_create(t_min.c_str(), t_max.c_str(), step.c_str(),
                                    mode.c_str(), sample_m, cap, cache_dir.c_str(),
                                    jobs, &report.r);
    if (st != NKS_OK) return fail_with(st);
    StringGuard text;
    st = nks_report_render(report.r, format.c_str(), &text.s);
    if (st != NKS_OK) return fail_with(st);
    int rc = write_output(text.s, out_path);
    if (rc != 0) return rc;
    return nks_report_row_failures(report.r) > 0 ? 2 : 0;
  }

  if (cmd_delta->parsed()) {
    if (format == "svg") {
      std::cerr << "error: delta reports render as csv or json\n";
      return 1;
    }
    ReportGuard report;
    nks_status st = nks_delta_create(d_min.c_str(), d_max.c_str(), d_step.c_str(),
                                     cache_dir.c_str(), jobs, &report.r);
    if (st != NKS_OK) return fail_with(st);
    StringGuard text;
    st = nks_report_render(report.r, format.c_str(), &text.s);
    if (st != NKS_OK) return fail_with(st);
    int rc = write_output(text.s, out_path);
    if (rc != 0) return rc;
    return nks_report_row_failures(report.r) > 0 ? 2 : 0;
  }

  if (cmd_verify->parsed()) {
    StringGuard text;
    int failures = 0;
    nks_status st = nks_verify_all(&text.s, &failures);
    if (st != NKS_OK) return fail_with(st);
    int rc = write_output(text.s, out_path);
    if (rc != 0) return rc;
    return failures > 0 ? 2 : 0;
  }

  return 1;
}
