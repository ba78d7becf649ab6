// One line per acceptance criterion. Exit status 1 if any line fails.
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "torusgas/verification.hpp"

int main(int argc, char** argv) {
  torusgas::AcceptanceOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> ids;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) options.threads = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) options.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (!std::strcmp(argv[i], "--verbose")) verbose = true;
    else ids.push_back(std::atoi(argv[i]));
  }
  if (ids.empty())
    for (int k = 1; k <= torusgas::kCriteria; ++k) ids.push_back(k);
  spdlog::set_level(spdlog::level::err);

  bool all = true;
  for (int id : ids) {
    std::string line;
    bool pass = false;
    try {
      auto r = torusgas::run_criterion(id, options);
      pass = r.pass;
      char buf[64];
      std::snprintf(buf, sizeof buf, " [%.1fs]", r.seconds);
      line = r.name + ": " + r.summary + buf;
      if (verbose)
        for (const auto& [k, v] : r.metrics) line += "\n    " + k + " = " + std::to_string(v);
      if (verbose && r.rows.size() <= 40) {
        line += "\n   ";
        for (const auto& c : r.columns) line += " " + c;
        for (const auto& row : r.rows) {
          line += "\n   ";
          for (double v : row) {
            char b[32];
            std::snprintf(b, sizeof b, " %.4g", v);
            line += b;
          }
        }
      }
    } catch (const std::exception& e) {
      line = std::string("error: ") + e.what();
    }
    std::printf("criterion %d %s  %s\n", id, pass ? "PASS" : "FAIL", line.c_str());
    std::fflush(stdout);
    all = all && pass;
  }
  return all ? 0 : 1;
}
