#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + DIFFSUM_CLI + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("diffsum_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const auto p = path / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("oracle command") {
  auto r = run("oracle F --k 1 --q 7");
  CHECK(r.status == 0);
  CHECK(has(r.out, "value: 3\n"));
  CHECK(has(r.out, "witness: 0,1,3\n"));
  r = run("oracle H --k 1 --q 3 --diameter 8 --format csv");
  CHECK(r.status == 0);
  CHECK(r.out == "quantity,k,q,value,exhaustive,diameter_bound,witness\nH,1,3,2,true,8,\"0,1\"\n");
  CHECK(run("oracle F --k 1 --q 40").status == 1);
  CHECK(run("oracle X --q 3").status == 2);
  CHECK(run("oracle F --k 1").status == 2);
  CHECK(run("oracle F --k 1 --q 3 --bogus").status == 2);
  CHECK(run("").status == 2);
  r = run("oracle F --k 1 --q-range 2:5 --format json");
  CHECK(r.status == 0);
  CHECK(has(r.out, "\"q\": 5"));
}

TEST_CASE("table command") {
  const auto r = run("table F --k 1 --q-range 2:13 --format csv");
  CHECK(r.status == 0);
  CHECK(has(r.out, "F,1,7,3,0.564575,0.564575,\n"));
}

TEST_CASE("construct commands") {
  TempDir dir;
  const std::string s1 = dir.file("stage1.json");
  auto r = run("construct stage1 --k 2 --delta 1/2 --out " + s1);
  CHECK(r.status == 0);
  CHECK(has(r.out, "modulus: 1001\n"));
  CHECK(has(r.out, "level_sum_size: 281\n"));
  CHECK(has(r.out, "set_size: 209\n"));
  CHECK(fs::exists(s1));

  const std::string st = dir.file("step.json");
  r = run("construct step --in " + s1 + " --delta-prime 1/2 --samples 10000 --out " + st);
  CHECK(r.status == 0);
  CHECK(has(r.out, "violations: 0\n"));
  CHECK(has(r.out, "accepted: true\n"));

  const auto v1 = run("construct verify --in " + st + " --samples 100 --seed 7");
  const auto v2 = run("construct verify --in " + st + " --samples 100 --seed 7 --threads 1");
  CHECK(v1.status == 0);
  CHECK(v1.out == v2.out);
  CHECK(has(v1.out, "seed: 7\n"));

  CHECK(run("construct stage1 --k 2 --delta 1/0").status == 2);
  CHECK(run("construct stage1 --k 2 --delta 3/2").status == 2);
  CHECK(run("construct step --in " + s1 + " --delta-prime 1/5").status == 2);
  CHECK(run("construct verify --in " + dir.file("missing.json")).status == 1);
  CHECK(run("construct step --in " + st + " --delta-prime 3/4").status == 1);  // step of a step

  r = run("construct report --k 3 --epsilon 1/2 --format csv");
  CHECK(r.status == 0);
  CHECK(has(r.out, "3,1/2,infeasible"));
}

TEST_CASE("check command") {
  const auto r = run("check --all --trials 2000 --seed 1");
  CHECK(r.status == 0);
  CHECK(has(r.out, "property,trials,violations,worst_margin,generator,seed\n"));
  CHECK(!has(r.out, ",1,"));  // every violations column is 0
  const auto a = run("check --property plunnecke --generator bk_set --trials 300 --seed 4 --threads 1");
  const auto b = run("check --property plunnecke --generator bk_set --trials 300 --seed 4 --threads 8");
  CHECK(a.out == b.out);
  CHECK(run("check --property nothing").status == 2);
}

TEST_CASE("transform commands") {
  TempDir dir;
  const auto f7 = dir.file("F1q7.set", "zq 7\n0\n1\n3\n");
  auto r = run("transform lift --in " + f7);
  CHECK(r.status == 0);
  CHECK(has(r.out, "difference_run: 15\n"));
  CHECK(has(r.out, "lift: -6,-4,0,1,3,7\n"));

  std::string sidon = "int\n";
  for (int x : {0, 1, 3, 7, 12, 20, 30, 44, 65, 80, 96}) sidon += std::to_string(x) + "\n";
  const auto s = dir.file("sidon101.set", sidon);
  const auto a3 = dir.file("a3.set");
  r = run("transform pipeline --in " + s + " --q 101 --k 2 --out " + a3);
  CHECK(r.status == 0);
  CHECK(has(r.out, "a3_difference_full: true\n"));
  std::ifstream in(a3);
  std::string header;
  std::getline(in, header);
  CHECK(header == "zq 101");
  const auto p1 = run("transform pipeline --in " + s + " --q 101 --k 2 --seed 5 --threads 1 --format json");
  const auto p8 = run("transform pipeline --in " + s + " --q 101 --k 2 --seed 5 --threads 8 --format json");
  CHECK(p1.out == p8.out);
  CHECK(run("transform pipeline --in " + f7 + " --q 101 --k 2").status == 1);  // wrong set type
  CHECK(run("transform pipeline --in " + s + " --q 500 --k 2").status == 2);   // |A-A| < q

  r = run("transform cover --in " + f7 + " --k 2");
  CHECK(r.status == 0);
  CHECK(has(r.out, "complete: true\n"));
  r = run("transform project --in " + s + " --q 10 --a 9223372036854775808");
  CHECK(has(r.out, "image: 0,5\n"));
  r = run("transform project --in " + s);
  CHECK(has(r.out, "image_above_third: true\n"));

  const auto z2 = dir.file("z2.set", "zq 2\n0\n1\n");
  r = run("transform witness --kind product --a1 " + f7 + " --a2 " + z2);
  CHECK(has(r.out, "difference_set_full: true\n"));
  CHECK(has(r.out, "size: 6\n"));
  const auto s3 = dir.file("s3.set", "int\n0\n1\n3\n");
  r = run("transform witness --kind spread --a1 " + s3 + " --a2 " + s3 + " --k 2");
  CHECK(has(r.out, "kfold_size: 36\n"));
  CHECK(has(r.out, "difference_size: 49\n"));
  CHECK(run("transform witness --kind base-q --a1 " + s3 + " --a2 " + s3).status == 2);
  CHECK(run("transform lift --in " + dir.file("bad.set", "zq 7\n9\n")).status == 1);
}

TEST_CASE("config file from the environment") {
  TempDir dir;
  const auto cfg = dir.file("cfg.json", R"({"oracle_max_q": 5, "format": "csv"})");
  auto r = run("oracle F --k 1 --q 7", "DIFFSUM_CONFIG=" + cfg);
  CHECK(r.status == 1);
  r = run("oracle F --k 1 --q 4", "DIFFSUM_CONFIG=" + cfg);
  CHECK(r.status == 0);
  CHECK(has(r.out, "quantity,k,q"));
  CHECK(run("oracle F --k 1 --q 4", "DIFFSUM_CONFIG=" + dir.file("broken.json", "{")).status == 2);
  r = run("oracle F --k 1 --q 7 --config " + cfg);
  CHECK(r.status == 1);
}
