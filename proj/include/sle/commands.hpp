#pragma once

#include <string>

#include "sle/config.hpp"
#include "sle/report.hpp"

namespace sle {

// Command entry points shared by the CLI and the test suites.  All paths are
// created if needed; outputs are byte-deterministic for a fixed config.
void cmd_solve(const RunConfig& cfg, const std::string& out_dir);
void cmd_spectrum(const RunConfig& cfg, const std::string& out_dir);
void cmd_smallp(const RunConfig& cfg, const std::string& out_dir);
void cmd_gd(const RunConfig& cfg, const std::string& out_dir);

// suite in {invariance, identities, smallp, wkb, spectrum}
Report run_suite(const RunConfig& cfg, const std::string& suite);

void write_file(const std::string& path, const std::string& content);

}  // namespace sle
