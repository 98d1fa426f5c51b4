#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fractsect/config.hpp"
#include "fractsect/report.hpp"
#include "fractsect/series.hpp"
#include "fractsect/synth.hpp"
#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace fractsect;

namespace {

fs::path tmp_root() {
  const char* env = std::getenv("FRACTSECT_TEST_TMP");
  fs::path p = env ? fs::path(env) : fs::temp_directory_path() / "fractsect_cli_test";
  fs::create_directories(p);
  return p;
}

fs::path fresh_dir(const std::string& name) {
  const auto p = tmp_root() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Geometric random walk prices, one CSV per call.
void write_prices(const fs::path& path, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 0.01);
  std::ofstream out(path);
  out << "Date,Open,Close\n";
  double p = 1000.0;
  for (std::size_t i = 0; i < rows; ++i) {
    p *= std::exp(g(gen));
    out << "d" << i << "," << p << "," << p << "\n";
  }
}

RunConfig small_config(const fs::path& out) {
  RunConfig c;
  c.s_min = 10;
  c.crossover = 40;
  c.s_max = 160;
  c.scales_per_regime = 6;
  c.q_min = -4;
  c.q_max = 4;
  c.q_step = 1;
  c.detrend = DetrendMode::Poly;
  c.poly_order = 2;
  c.out_dir = out.string();
  return c;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::size_t columns(const std::string& line) {
  std::istringstream in(line);
  std::size_t n = 0;
  std::string tok;
  while (in >> tok) ++n;
  return n;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FRACTSECT_BIN) + " " + args + " 2>/dev/null";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("config file parsing and precedence") {
  RunConfig c;
  std::istringstream text(
      "# comment\n"
      "s_min = 12\n"
      "detrend = poly:3\n"
      "q_step=0.25   # trailing comment\n"
      "input = a/AU.csv\n"
      "input = b/x.csv, BX\n");
  read_config(text, c);
  CHECK(c.s_min == 12);
  CHECK(c.detrend == DetrendMode::Poly);
  CHECK(c.poly_order == 3);
  CHECK(c.q_step == 0.25);
  REQUIRE(c.inputs.size() == 2);
  CHECK(c.inputs[0].label == "AU");
  CHECK(c.inputs[1].label == "BX");

  apply_setting(c, "detrend", "eemd-global");
  CHECK(c.detrend == DetrendMode::EemdGlobal);
  CHECK(c.resolved_ensemble_size() == 100);
  apply_setting(c, "detrend", "eemd-window");
  CHECK(c.resolved_ensemble_size() == 16);

  CHECK(error_code([&] { apply_setting(c, "nonsense", "1"); }) == ErrorCode::BadConfig);
  CHECK(error_code([&] { apply_setting(c, "s_min", "ten"); }) == ErrorCode::BadConfig);
  CHECK(error_code([&] { apply_setting(c, "detrend", "spline"); }) == ErrorCode::BadConfig);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK(error_code([&] { c.validate(); }) == ErrorCode::BadConfig);
  try {
    c.validate();
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no inputs") != std::string::npos);
  }
  c.inputs = {{"x.csv", "X"}, {"y.csv", "X"}};
  CHECK(error_code([&] { c.validate(); }) == ErrorCode::BadConfig);
  c.inputs = {{"x.csv", "X"}};
  CHECK_NOTHROW(c.validate());
  c.crossover = 5000;
  CHECK(error_code([&] { c.validate(); }) == ErrorCode::BadConfig);
}

TEST_CASE("config hash") {
  RunConfig a;
  a.inputs = {{"x.csv", "X"}};
  RunConfig b = a;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.seed += 1;
  CHECK(a.hash() != b.hash());
  // Writing the default explicitly does not change the resolved config.
  RunConfig c = a;
  apply_setting(c, "ensemble_size", "16");
  CHECK(a.hash() == c.hash());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("seed from the environment") {
  ::unsetenv("FRACTSECT_SEED");
  CHECK_FALSE(seed_from_env().has_value());
  ::setenv("FRACTSECT_SEED", "42", 1);
  CHECK(seed_from_env() == 42u);
  ::setenv("FRACTSECT_SEED", "x42", 1);
  CHECK(error_code([] { seed_from_env(); }) == ErrorCode::BadConfig);
  ::unsetenv("FRACTSECT_SEED");
}

TEST_CASE("analyze with no inputs exits 2") {
  std::ostringstream log;
  RunConfig c = small_config(fresh_dir("none"));
  CHECK(cmd_analyze(c, log) == 2);
  CHECK(log.str().find("no inputs") != std::string::npos);
}

TEST_CASE("one corrupt file among three") {
  const auto dir = fresh_dir("partial");
  write_prices(dir / "AU.csv", 600, 1);
  write_prices(dir / "BX.csv", 600, 2);
  {
    std::ofstream bad(dir / "CD.csv");
    bad << "Date,Close\n1,100\n2,-5\n";
  }
  RunConfig c = small_config(dir / "out");
  for (const char* s : {"AU", "BX", "CD"}) c.inputs.push_back(parse_input((dir / (std::string(s) + ".csv")).string()));
  std::ostringstream log;
  CHECK(cmd_analyze(c, log) == 0);
  const auto rows = data_lines(slurp(dir / "out" / "report.txt"));
  CHECK(rows.size() == 2);

  const auto j = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(j["warnings"].size() == 1);
  CHECK(j["succeeded"] == 2);
  CHECK(j["failed"] == 1);
}

TEST_CASE("every input failing exits 1") {
  const auto dir = fresh_dir("allbad");
  RunConfig c = small_config(dir / "out");
  c.inputs.push_back({(dir / "missing.csv").string(), "M"});
  std::ostringstream log;
  CHECK(cmd_analyze(c, log) == 1);
}

TEST_CASE("22 sector files give a 22 by 8 table") {
  const auto dir = fresh_dir("sectors");
  RunConfig c = small_config(dir / "out");
  std::uint64_t seed = 100;
  for (const auto& m : bse_sectors()) {
    const auto p = dir / (m.symbol + ".csv");
    write_prices(p, 1362, seed++);
    c.inputs.push_back(parse_input(p.string()));
  }
  std::ostringstream log;
  REQUIRE(cmd_analyze(c, log) == 0);
  const std::string table = slurp(dir / "out" / "report.txt");
  const auto rows = data_lines(table);
  REQUIRE(rows.size() == 22);
  for (const auto& r : rows) CHECK(columns(r) == 8);
  std::set<std::string> labels;
  for (const auto& r : rows) labels.insert(r.substr(0, r.find(' ')));
  CHECK(labels.size() == 22);
  CHECK(labels.count("AU") == 1);

  const auto j = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(j["sectors"].size() == 22);
}

TEST_CASE("artifacts are reproducible and carry the config hash") {
  const auto dir = fresh_dir("repro");
  write_prices(dir / "FN.csv", 800, 9);
  RunConfig c = small_config(dir / "a");
  c.detrend = DetrendMode::EemdWindow;
  c.ensemble_size = 2;
  c.s_min = 16;
  c.crossover = 32;
  c.s_max = 64;
  c.scales_per_regime = 5;
  c.inputs.push_back(parse_input((dir / "FN.csv").string()));
  std::ostringstream log;
  REQUIRE(cmd_analyze(c, log) == 0);
  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    first[entry.path().filename().string()] = slurp(entry.path());
  }
  REQUIRE(cmd_analyze(c, log) == 0);

  std::size_t files = 0;
  for (const auto& [name, text] : first) {
    CHECK(slurp(dir / "a" / name) == text);
    CHECK(text.find(c.hash()) != std::string::npos);
    // JSON round trip is byte-identical.
    if (name == "report.json") CHECK(nlohmann::json::parse(text).dump(2) + "\n" == text);
    ++files;
  }
  CHECK(files == 7);  // report.txt, report_short.txt, report.json, 4 plot TSVs
  CHECK(fs::exists(dir / "a" / "FN.fq.tsv"));
  CHECK(fs::exists(dir / "a" / "FN.falpha.tsv"));
}

TEST_CASE("emit flags select artifacts") {
  const auto dir = fresh_dir("emit");
  write_prices(dir / "HC.csv", 600, 4);
  RunConfig c = small_config(dir / "out");
  c.inputs.push_back(parse_input((dir / "HC.csv").string()));
  c.emit_json = false;
  c.emit_plotdata = false;
  std::ostringstream log;
  REQUIRE(cmd_analyze(c, log) == 0);
  CHECK(fs::exists(dir / "out" / "report.txt"));
  CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "HC.fq.tsv"));
}

TEST_CASE("synth commands") {
  const auto dir = fresh_dir("synth");
  const std::string d = dir.string() + "/";
  REQUIRE(run("synth cascade --levels 14 --a 0.6 --seed 7 --out " + d + "c.tsv") == 0);
  {
    std::ifstream in(dir / "c.tsv");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 16384);
  }
  REQUIRE(run("synth fgn --n 4096 --hurst 0.7 --seed 1 --out " + d + "f1.tsv") == 0);
  REQUIRE(run("synth fgn --n 4096 --hurst 0.7 --seed 1 --out " + d + "f2.tsv") == 0);
  CHECK(slurp(dir / "f1.tsv") == slurp(dir / "f2.tsv"));

  REQUIRE(run("synth shuffle --in " + d + "f1.tsv --seed 3 --out " + d + "s.tsv") == 0);
  std::ifstream a(dir / "f1.tsv");
  std::ifstream b(dir / "s.tsv");
  auto x = read_tsv(a, SeriesKind::Synthetic, "x");
  auto y = read_tsv(b, SeriesKind::Synthetic, "y");
  std::vector<double> va(x.values().begin(), x.values().end());
  std::vector<double> vb(y.values().begin(), y.values().end());
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  CHECK(va == vb);

  CHECK(run("synth cascade --levels 3 --out " + d + "bad.tsv") != 0);
  CHECK(run("analyze --out " + d + "none") != 0);
}
