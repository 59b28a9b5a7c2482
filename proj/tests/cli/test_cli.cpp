#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(CROSSVAR_TEST_TMP) / "cli";

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path out = kWork / "stdout.txt";
  const fs::path err = kWork / "stderr.txt";
  const std::string cmd = std::string(CROSSVAR_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          err.string() + " < /dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("simulate is reproducible") {
  const auto a = kWork / "sim_a";
  const auto b = kWork / "sim_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("simulate --hurst 0.7 -N 1000 --seed 5 -o " + a.string()).code == 0);
  REQUIRE(run("simulate --hurst 0.7 -N 1000 --seed 5 -o " + b.string()).code == 0);
  CHECK(slurp(a / "path.csv") == slurp(b / "path.csv"));
  CHECK(fs::exists(a / "manifest.json"));
  REQUIRE(run("simulate --hurst 0.7 -N 1000 --seed 5 --format bin --bivariate -o " + a.string()).code == 0);
  REQUIRE(run("simulate --hurst 0.7 -N 1000 --seed 5 --format bin --bivariate -o " + b.string()).code == 0);
  CHECK(slurp(a / "path1.bin") == slurp(b / "path1.bin"));
  CHECK(fs::file_size(a / "path2.bin") == 40 + 8 * 1001);
}

TEST_CASE("simulate row count and usage errors") {
  const auto dir = kWork / "sim_big";
  REQUIRE(run("simulate --hurst 0.6 -N 16384 -o " + dir.string()).code == 0);
  std::ifstream in(dir / "path.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 16384 + 2);  // header + N + 1 points
  CHECK(run("simulate --hurst 1.2 -N 16 -o " + dir.string()).code == 2);
  CHECK(run("simulate --hurst 0.6").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("experiment dispatch") {
  const auto cfg = kWork / "lemma2.json";
  write(cfg, R"({"experiment":"lemma2","hurst":0.6,"n_grid":[10000],"replications":2,"seed":0,"oversampling":1,
    "lemma2":{"g":{"kind":"trigonometric","function":"cos"},"h":{"kind":"polynomial","coefficients":[0,1]}},
    "tolerances":{"abs_error":0.001}})");
  const auto out = kWork / "exp";
  fs::remove_all(out);
  const auto r = run("experiment -c " + cfg.string() + " -o " + out.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "replicates.csv"));
  CHECK(slurp(out / "manifest.json").find("\"status\": \"completed\"") != std::string::npos);

  const auto bad = kWork / "bad.json";
  write(bad, R"({"experiment":"theorem7","hurst":0.6,"n_grid":[64],"replications":2,"seed":0})");
  const auto r2 = run("experiment -c " + bad.string() + " -o " + (kWork / "exp_bad").string());
  CHECK(r2.code == 2);
  CHECK(r2.err.find("theorem7") != std::string::npos);

  const auto dry = run("experiment --dry-run -c " + cfg.string());
  CHECK(dry.code == 0);
  CHECK(dry.out.find("config_digest") != std::string::npos);

  // a failing gate gives exit 1
  const auto strict = kWork / "strict.json";
  write(strict, R"({"experiment":"lemma2","hurst":0.6,"n_grid":[10],"replications":2,"seed":0,"oversampling":1,
    "lemma2":{"g":{"kind":"trigonometric","function":"cos"}},"tolerances":{"abs_error":1e-9}})");
  CHECK(run("experiment -c " + strict.string() + " -o " + (kWork / "exp_strict").string()).code == 1);
}

TEST_CASE("manifest rerun is byte identical across worker counts") {
  const auto cfg = kWork / "t2.json";
  write(cfg, R"({"experiment":"theorem2","hurst":0.6,"n_grid":[128,256],"replications":40,"seed":3,"oversampling":1})");
  const auto a = kWork / "rerun_a";
  const auto b = kWork / "rerun_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run("experiment -j 1 -c " + cfg.string() + " -o " + a.string()).code == 0);
  REQUIRE(run("experiment -j 3 --manifest " + (a / "manifest.json").string() + " -o " + b.string()).code == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "replicates.csv") == slurp(b / "replicates.csv"));
}

TEST_CASE("test command") {
  const auto sigma = kWork / "identity.json";
  write(sigma, R"({"s11":1,"s22":1})");
  const auto data = kWork / "h0data";
  REQUIRE(run("simulate --hurst 0.6 -N 4096 --seed 17 --sigma " + sigma.string() + " -o " + data.string()).code == 0);
  const auto r = run("test --csv " + (data / "increments.csv").string() + " --hurst 0.6");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"decision\":\"accept\"") != std::string::npos);

  const auto b = run("test --bin1 " + (data / "x1.csv").string() + " --bin2 " + (data / "x2.csv").string() +
                     " --hurst 0.6");
  CHECK(b.code == 2);  // csv is not a binary dump

  const auto hi = run("test --csv " + (data / "increments.csv").string() + " --hurst 0.8");
  CHECK(hi.code == 3);
  CHECK(hi.err.find("unsupported regime") != std::string::npos);

  const auto broken = kWork / "broken.csv";
  write(broken, "dx1,dx2\n0.1,0.2\n0.3,0.4\n0.5;0.6\n");
  const auto m = run("test --csv " + broken.string() + " --hurst 0.6");
  CHECK(m.code == 2);
  CHECK(m.err.find("row 4") != std::string::npos);
}

TEST_CASE("constants table") {
  const auto r = run("constants --hurst 0.6 --hurst 0.75");
  CHECK(r.code == 0);
  CHECK(r.out.find("4.32852") != std::string::npos);
  CHECK(r.out.find("0.735194") != std::string::npos);
}
