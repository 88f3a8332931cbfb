#ifndef NODALKSTAB_VERIFY_HPP
#define NODALKSTAB_VERIFY_HPP

// The acceptance suite: every check runs at zero tolerance against an
// independent oracle (brute-force enumeration, closed-form counting, or the
// exact catalog formulas). Shared by the `verify-all` CLI verb and the
// acceptance test binary.

#include <string>
#include <vector>

namespace nks::verify {

struct CheckResult {
  std::string id;
  bool pass;
  std::string detail;  // failure explanation, empty on pass
};

std::vector<CheckResult> run_acceptance();

// One "PASS/FAIL [id] ..." line per criterion.
std::string render_lines(const std::vector<CheckResult>& results);

int count_failures(const std::vector<CheckResult>& results);

}  // namespace nks::verify

#endif  // NODALKSTAB_VERIFY_HPP
