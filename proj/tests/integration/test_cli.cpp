#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace std::string_literals;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("reqgrid-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = "\""s + REQGRID_CLI_PATH + "\" " + args + " >" + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("make-sample, run, stats, audit, and compare work end to end") {
  TempDir tmp;
  fs::path log = tmp.path / "log.txt";

  REQUIRE(run_cli("make-sample --out " + tmp.path.string(), log) == 0);
  REQUIRE(fs::exists(tmp.path / "config.json"));
  REQUIRE(fs::exists(tmp.path / "data" / "promise.csv"));

  // binary-family inference grid on the sample config (3 models x 90)
  std::string run_args = "run --config " + (tmp.path / "config.json").string() + " --out " +
                         (tmp.path / "out").string() + " --family binary --pipeline inference";
  REQUIRE(run_cli(run_args, log) == 0);
  CHECK(fs::exists(tmp.path / "out" / "results.csv"));

  int rc = run_cli("stats --results " + (tmp.path / "out").string() +
                       " --factor pattern --measure wF1 --family binary",
                   tmp.path / "stats.txt");
  CHECK(rc == 0);
  std::string stats_out = slurp(tmp.path / "stats.txt");
  CHECK(stats_out.find("wF1,pattern,binary,friedman,") != std::string::npos);

  CHECK(run_cli("audit --results " + (tmp.path / "out").string() + " --config " +
                    (tmp.path / "config.json").string(),
                log) == 0);

  // embedding run plus cross-pipeline comparison on Security
  std::string emb_args = "run --config " + (tmp.path / "config.json").string() + " --out " +
                         (tmp.path / "emb").string() + " --family binary --pipeline embedding";
  REQUIRE(run_cli(emb_args, log) == 0);
  int crc = run_cli("compare --a " + (tmp.path / "out").string() + " --b " +
                        (tmp.path / "emb").string() + " --task Security",
                    tmp.path / "compare.txt");
  CHECK(crc == 0);
  std::string compare_out = slurp(tmp.path / "compare.txt");
  CHECK(compare_out.find("wF1,Security,") != std::string::npos);
}

TEST_CASE("run accepts --pattern, --embedding-mode, and --threshold") {
  TempDir tmp;
  fs::path log = tmp.path / "log.txt";
  REQUIRE(run_cli("make-sample --out " + tmp.path.string(), log) == 0);

  std::string base = "run --config " + (tmp.path / "config.json").string();
  REQUIRE(run_cli(base + " --out " + (tmp.path / "one").string() +
                      " --family multiclass --pipeline inference --pattern is-about-assertion",
                  log) == 0);
  std::string results = slurp(tmp.path / "one" / "results.csv");
  CHECK(results.find("is-about-assertion") != std::string::npos);
  CHECK(results.find("belongs-to") == std::string::npos);

  CHECK(run_cli(base + " --out x --pattern no-such-pattern", log) == 1);

  // threshold mode can abstain; the row count still covers the task
  REQUIRE(run_cli(base + " --out " + (tmp.path / "thr").string() +
                      " --pipeline embedding --embedding-mode threshold --threshold 0.99",
                  log) == 0);
  CHECK(fs::exists(tmp.path / "thr" / "results.csv"));
}

TEST_CASE("exit codes: 1 config, 2 backend, 3 io") {
  TempDir tmp;
  fs::path log = tmp.path / "log.txt";

  // missing config file -> io error (3)
  CHECK(run_cli("run --config " + (tmp.path / "nope.json").string() + " --out " +
                    (tmp.path / "o").string(),
                log) == 3);

  // malformed config -> config error (1)
  std::ofstream(tmp.path / "bad.json") << "{ not json";
  CHECK(run_cli("run --config " + (tmp.path / "bad.json").string() + " --out " +
                    (tmp.path / "o").string(),
                log) == 1);

  // unreachable backend -> backend error (2)
  REQUIRE(run_cli("make-sample --out " + tmp.path.string(), log) == 0);
  std::string config = slurp(tmp.path / "config.json");
  const std::string needle = "\"backend\": \"mock\"";
  std::size_t pos = 0, hits = 0;
  while ((pos = config.find(needle, pos)) != std::string::npos) {
    config.replace(pos, needle.size(), "\"backend\": \"http://127.0.0.1:1\"");
    ++hits;
  }
  REQUIRE(hits >= 3);
  std::ofstream(tmp.path / "unreachable.json") << config;
  CHECK(run_cli("run --config " + (tmp.path / "unreachable.json").string() + " --out " +
                    (tmp.path / "o").string() + " --family binary --pipeline inference",
                log) == 2);
}

TEST_CASE("fault injection + --resume completes the grid") {
  TempDir tmp;
  fs::path log = tmp.path / "log.txt";
  REQUIRE(run_cli("make-sample --out " + tmp.path.string(), log) == 0);

  // shrink the grid via family filter; die after 400 backend calls
  std::string base = "run --config " + (tmp.path / "config.json").string() + " --out " +
                     (tmp.path / "o").string() + " --family multiclass --pipeline inference";
  CHECK(run_cli(base + " --max-backend-calls 400", log) == 2);
  REQUIRE(run_cli(base + " --resume", log) == 0);

  std::string uninterrupted = "run --config " + (tmp.path / "config.json").string() + " --out " +
                              (tmp.path / "u").string() +
                              " --family multiclass --pipeline inference";
  REQUIRE(run_cli(uninterrupted, log) == 0);
  CHECK(slurp(tmp.path / "o" / "results.csv") == slurp(tmp.path / "u" / "results.csv"));
}

TEST_SUITE_END();
