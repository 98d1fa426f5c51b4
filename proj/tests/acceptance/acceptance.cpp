// Acceptance run: the full oracle suite, one PASS/FAIL line per criterion,
// plus a cross-process determinism check of the CLI.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "fractsect/validation.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Two separate `validate --quick` processes must print identical tables.
bool cli_repeatable(std::string& detail) {
  const std::string base = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                           "/fractsect_acceptance_";
  const std::string a = base + "a.txt";
  const std::string b = base + "b.txt";
  for (const auto& out : {a, b}) {
    const std::string cmd = std::string(FRACTSECT_BIN) + " validate --quick > " + out + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) {
      detail = "could not start " FRACTSECT_BIN;
      return false;
    }
  }
  const std::string ta = slurp(a);
  const std::string tb = slurp(b);
  std::remove(a.c_str());
  std::remove(b.c_str());
  if (ta.empty()) {
    detail = "empty output";
    return false;
  }
  detail = std::to_string(ta.size()) + " bytes, " + (ta == tb ? "identical" : "different");
  return ta == tb;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  fractsect::ValidationOptions opts;
  auto results = fractsect::run_validation(opts, &std::cerr);

  std::string detail;
  const bool repeat = cli_repeatable(detail);
  for (auto& r : results) {
    if (r.id != 9) continue;
    r.details.push_back(std::string("cli validate --quick twice: ") + detail);
    r.pass = r.pass && repeat;
  }

  std::cout << fractsect::format_validation(results, opts);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << "\n";
    failed += !r.pass;
  }
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::cout << "acceptance: " << results.size() - failed << "/" << results.size()
            << " passed in " << static_cast<long>(secs) << " s\n";
  return failed == 0 ? 0 : 1;
}
