// Acceptance gate runner: one pass/fail line per criterion, nonzero exit on
// any failure. --criterion N restricts to one criterion (repeatable);
// --quiet drops the per-seed progress lines.
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "rgossip/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  bool quiet = false;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else if (arg.rfind("--criterion=", 0) == 0) {
      ids.push_back(std::atoi(arg.c_str() + std::strlen("--criterion=")));
    } else if (arg == "--quiet") {
      quiet = true;
    } else if (arg == "--list") {
      for (int id : rgossip::acceptance_ids())
        std::cout << 'A' << id << ' ' << rgossip::acceptance_name(id) << '\n';
      return 0;
    } else {
      std::cerr << "usage: " << argv[0] << " [--criterion N]... [--quiet] [--list]\n";
      return 1;
    }
  }
  if (ids.empty()) ids = rgossip::acceptance_ids();

  std::ostream* progress = quiet ? nullptr : &std::cerr;
  int failures = 0;
  for (int id : ids) {
    rgossip::CriterionResult r;
    try {
      r = rgossip::run_acceptance_criterion(id, progress);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = rgossip::acceptance_name(id);
      r.pass = false;
      r.detail = std::string("threw: ") + e.what();
    }
    std::cout << rgossip::format_criterion_result(r) << std::endl;
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
