#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sle {

struct CheckRecord {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;  // e.g. "range [0.98, 1.02]"
};

struct Report {
  std::string suite;
  std::vector<CheckRecord> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void check_le(const std::string& name, double measured, double bound) {
    checks.push_back({name, measured, bound, measured <= bound, "<="});
  }
  void check_ge(const std::string& name, double measured, double bound) {
    checks.push_back({name, measured, bound, measured >= bound, ">="});
  }
  void check_range(const std::string& name, double measured, double lo, double hi) {
    CheckRecord r{name, measured, hi, measured >= lo && measured <= hi, ""};
    r.note = "in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    checks.push_back(r);
  }
  void check_true(const std::string& name, bool pass) {
    checks.push_back({name, pass ? 1.0 : 0.0, 1.0, pass, "flag"});
  }

  void print(std::ostream& os) const;
  std::string to_json() const;
};

}  // namespace sle
