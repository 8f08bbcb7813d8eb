// End-to-end tests of the command-line tool: exit codes, JSON shapes,
// byte-level determinism, and the connection-independence guarantees.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <projquant/jsonio.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <sys/wait.h>

using projquant::Json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;

  Json json() const { return Json::parse(out); }
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string("PROJQUANT_LOG=quiet \"") + PROJQUANT_CLI_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "projquant-cli-test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream f(path);
  f << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

const char* kSymbolK1 = R"({"k":1,"coeffs":{"1,0|0,0":"1"}})";
const char* kSymbolK2 = R"({"k":2,"coeffs":{"2,0|0,0":"1","1,1|0,0":{"1,0":"1/2"}}})";

}  // namespace

TEST_CASE("critical: concrete pair reports per-block verdicts") {
  const RunResult r = run_cli("critical --m 2 --kmax 3 --rep1 trivial:0 --rep2 trivial:0");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["m"] == 2);
  CHECK(j["delta"] == "0");
  CHECK(j["any_critical"] == false);
  CHECK(j["verdicts"].size() == 4);  // one density block per degree 0..3
  CHECK(j["verdicts"][2]["alpha"] == "8/3");
}

TEST_CASE("critical: a resonant shift at a generic weight exits 3") {
  const RunResult r = run_cli("critical --m 2 --kmax 1 --rep1 trivial:7/11 --delta 1");
  CHECK(r.exit_code == 3);
  CHECK(r.json()["any_critical"] == true);
}

TEST_CASE("critical: shift-parameter scan settles every candidate") {
  const RunResult r = run_cli("critical --m 2 --kmax 3 --rep1 trivial:7/11");
  CHECK(r.exit_code == 3);
  const Json j = r.json();
  const Json expected = Json::array({"1", "4/3", "5/3", "2", "7/3"});
  CHECK(j["critical_deltas"] == expected);
  for (const Json& c : j["candidates"]) CHECK(c["critical"] == true);
}

TEST_CASE("critical: scan below the first resonant degree is empty") {
  const RunResult r = run_cli("critical --m 2 --kmax 0 --rep1 trivial:0");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["candidates"].empty());
  CHECK(j["critical_deltas"].empty());
}

TEST_CASE("configuration errors exit 2") {
  CHECK(run_cli("critical --m 2 --kmax 2 --rep1 trivial:0 --delta 1/0").exit_code == 2);
  CHECK(run_cli("quantize --m 2 --kmax 1 --delta 1/2").exit_code == 2);          // missing --rep1
  CHECK(run_cli("quantize --m 2 --kmax 1 --rep1 trivial:0").exit_code == 2);     // missing --rep2/--delta
  CHECK(run_cli("verify --suite no-such-suite").exit_code == 2);
  CHECK(run_cli("frobnicate --m 2").exit_code == 2);                             // unknown subcommand
  CHECK(run_cli("quantize --m 2 --rep1 trivial:0 --delta 0 --symbol /no/such/file.json").exit_code == 2);
  const std::string conn3 = write_file("conn_m3.json", R"({"m":3,"gamma":{}})");
  CHECK(run_cli("quantize --m 2 --rep1 trivial:0 --delta 0 --symbol '" + std::string(kSymbolK1) +
                "' --connection " + conn3)
            .exit_code == 2);  // dimension mismatch
}

TEST_CASE("quantize: per-degree tables") {
  const RunResult r = run_cli("quantize --m 2 --kmax 2 --rep1 trivial:1/3 --delta 4/7");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["m"] == 2);
  CHECK(j["k"] == 2);
  CHECK(j["rep1"] == "trivial:1/3");
  CHECK(j["tables"].size() == 3);  // one table per correction level 0..2
}

TEST_CASE("quantize: tables at a critical shift exit 3 with a report") {
  const RunResult r = run_cli("quantize --m 2 --kmax 1 --rep1 trivial:7/11 --delta 1");
  CHECK(r.exit_code == 3);
  const Json j = r.json();
  CHECK(j["critical"] == true);
  CHECK(j["report"]["any_critical"] == true);
}

TEST_CASE("quantize: operator of an inline symbol") {
  const RunResult r =
      run_cli("quantize --m 2 --rep1 trivial:1/3 --rep2 trivial:1/3 --symbol '" + std::string(kSymbolK1) + "'");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["k"] == 1);
  CHECK(j["operator"]["order"] == 1);
  CHECK(j["operator"]["terms"].contains("1,0"));
}

TEST_CASE("quantize: zero connection matches flat mode byte for byte") {
  const std::string conn0 = write_file("conn_zero.json", R"({"m":2,"gamma":{}})");
  const std::string base = "quantize --m 2 --rep1 trivial:1/3 --delta 4/7 --symbol '" + std::string(kSymbolK2) + "'";
  const RunResult flat = run_cli(base);
  const RunResult curved = run_cli(base + " --connection " + conn0);
  CHECK(flat.exit_code == 0);
  CHECK(curved.exit_code == 0);
  CHECK(flat.out == curved.out);
}

TEST_CASE("quantize: connections with the same geodesics give identical output") {
  const std::string conn = write_file(
      "conn_a.json", R"({"m":2,"gamma":{"0,0,0":"1/2","0,0,1":{"0,1":"1/3"},"1,1,1":"2/5"}})");
  // the same class, shifted along the one-form (x0, 0)
  const std::string shifted = write_file(
      "conn_b.json",
      R"({"m":2,"gamma":{"0,0,0":{"0,0":"1/2","1,0":"2"},"0,0,1":{"0,1":"1/3"},"1,0,1":{"1,0":"1"},"1,1,1":"2/5"}})");
  const std::string base = "quantize --m 2 --rep1 trivial:1/3 --delta 4/7 --symbol '" + std::string(kSymbolK2) + "'";
  const RunResult a = run_cli(base + " --connection " + conn);
  const RunResult b = run_cli(base + " --connection " + shifted);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(a.out == b.out);

  // and a genuinely different class changes the operator
  const std::string other = write_file("conn_c.json", R"({"m":2,"gamma":{"0,1,1":{"1,0":"1"}}})");
  const RunResult c = run_cli(base + " --connection " + other);
  CHECK(c.exit_code == 0);
  CHECK(a.out != c.out);
}

TEST_CASE("quantize: operator at a critical shift exits 3") {
  const RunResult r =
      run_cli("quantize --m 2 --rep1 trivial:7/11 --delta 1 --symbol '" + std::string(kSymbolK1) + "'");
  CHECK(r.exit_code == 3);
  CHECK(r.json()["critical"] == true);
}

TEST_CASE("casimir-spectrum: per-degree blocks with exact dimensions") {
  const RunResult r = run_cli("casimir-spectrum --m 2 --kmax 1 --rep1 sym:1:1/2 --rep2 trivial:1/7");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["delta"] == "6/7");
  REQUIRE(j["degrees"].size() == 2);
  CHECK(j["degrees"][0]["blocks"][0]["alpha"] == "25/196");
  CHECK(j["degrees"][0]["blocks"][0]["dim"] == "2");
  REQUIRE(j["degrees"][1]["blocks"].size() == 2);
  CHECK(j["degrees"][1]["blocks"][0]["cprime"] == "0");
  CHECK(j["degrees"][1]["blocks"][1]["dim"] == "3");
}

TEST_CASE("verify: every suite passes") {
  for (const char* suite : {"crochet", "gamma", "casimir", "tech"}) {
    const RunResult r = run_cli(std::string("verify --suite ") + suite + " --kmax 2 --seed 11");
    CAPTURE(suite);
    CHECK(r.exit_code == 0);
    CHECK(r.json()["passed"] == true);
  }
  const RunResult fe = run_cli("verify --suite flat-equivariance --m 2 --seed 7");
  CHECK(fe.exit_code == 0);
  CHECK(fe.json()["passed"] == true);
}

TEST_CASE("verify: curved-invariance exercises the connection-level laws") {
  const RunResult r = run_cli("verify --suite curved-invariance --m 2 --kmax 2 --seed 5");
  CHECK(r.exit_code == 0);
  const Json j = r.json();
  CHECK(j["passed"] == true);
  bool saw_shift = false, saw_commute = false;
  for (const Json& c : j["checks"]) {
    const std::string name = c["name"].get<std::string>();
    if (name.rfind("shift_invariance", 0) == 0) saw_shift = true;
    if (name.rfind("invariant_commutes", 0) == 0) saw_commute = true;
  }
  CHECK(saw_shift);
  CHECK(saw_commute);
}

TEST_CASE("verify: an injected sign fault is caught with a counterexample") {
  const RunResult r = run_cli("verify --suite gamma --kmax 2 --seed 11 --inject-fault");
  CHECK(r.exit_code == 1);
  const Json j = r.json();
  CHECK(j["passed"] == false);
  bool found = false;
  for (const Json& c : j["checks"])
    if (c["pass"] == false && c.contains("counterexample")) {
      const Json& cx = c["counterexample"];
      found = cx.contains("h") && cx.contains("symbol") && cx.contains("closed_form_drop");
    }
  CHECK(found);
}

TEST_CASE("same flags and seed produce byte-identical output") {
  const std::string args = "verify --suite casimir --kmax 2 --seed 3";
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  const std::string scan = "critical --m 2 --kmax 3 --rep1 trivial:7/11";
  CHECK(run_cli(scan).out == run_cli(scan).out);
}

TEST_CASE("--out writes the file atomically and mirrors stdout") {
  const std::string out = (scratch_dir() / "tables.json").string();
  const std::string args = "quantize --m 2 --kmax 1 --rep1 trivial:1/3 --delta 4/7";
  const RunResult direct = run_cli(args);
  const RunResult filed = run_cli(args + " --out " + out);
  CHECK(filed.exit_code == 0);
  CHECK(filed.out.empty());
  CHECK(slurp(out) == direct.out);
  CHECK(!std::filesystem::exists(out + ".tmp"));
}

TEST_CASE("rationals are rendered as p/q strings, never floats") {
  const RunResult r = run_cli("quantize --m 2 --kmax 2 --rep1 trivial:1/3 --delta 4/7");
  REQUIRE(r.exit_code == 0);
  std::function<void(const Json&)> walk = [&](const Json& j) {
    CHECK(!j.is_number_float());
    if (j.is_object())
      for (const auto& [k, v] : j.items()) walk(v);
    else if (j.is_array())
      for (const Json& v : j) walk(v);
  };
  walk(r.json());
}
