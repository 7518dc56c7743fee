#include "sle/report.hpp"

#include <json.hpp>

#include "sle/config.hpp"

namespace sle {

void Report::print(std::ostream& os) const {
  for (const auto& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << suite << "/" << c.name
       << "  measured=" << format_double(c.measured) << "  bound=" << format_double(c.bound);
    if (!c.note.empty() && c.note != "<=") os << "  (" << c.note << ")";
    os << "\n";
  }
  os << (ok() ? "[PASS] " : "[FAIL] ") << suite << " overall\n";
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["overall_pass"] = ok();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["measured"] = c.measured;
    jc["bound"] = c.bound;
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    arr.push_back(jc);
  }
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace sle
