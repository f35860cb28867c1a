// End-to-end tests for the command line tool.  The binary under test is
// located through the SPARSEFACT_BIN environment variable (set by ctest);
// every invocation redirects stdout/stderr to files in a scratch directory.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sparsefact/hadamard.hpp"
#include "sparsefact/io.hpp"
#include "sparsefact/metrics.hpp"
#include "sparsefact/serialize.hpp"

namespace sf = sparsefact;
namespace fs = std::filesystem;

namespace {

fs::path scratch_root() {
  static const fs::path root = [] {
    const fs::path r = fs::temp_directory_path() /
                       ("sparsefact_cli_" + std::to_string(::getpid()));
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return root;
}

fs::path fresh_path(const std::string& name) {
  static int counter = 0;
  return scratch_root() / (std::to_string(counter++) + "_" + name);
}

fs::path fresh_dir(const std::string& stem) {
  const fs::path p = fresh_path(stem);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_tool(const std::string& args) {
  const char* bin = std::getenv("SPARSEFACT_BIN");
  REQUIRE_MESSAGE(bin != nullptr,
                  "SPARSEFACT_BIN must point at the command line tool");
  const fs::path out = fresh_path("stdout.txt");
  const fs::path err = fresh_path("stderr.txt");
  const std::string cmd = "\"" + std::string(bin) + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (status >= 0 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  REQUIRE(static_cast<bool>(out));
}

sf::Json read_json(const fs::path& p) { return sf::Json::parse(slurp(p)); }

// Loads the operator back from an output directory the way `apply` does.
sf::MultiLayerOperator load_operator(const fs::path& dir) {
  const sf::Json rj = read_json(dir / "report.json");
  sf::MultiLayerOperator op;
  op.scale = rj.at("scale").get<double>();
  for (const auto& f : rj.at("factor_files")) {
    const sf::MatrixFile mf =
        sf::read_matrix_file((dir / f.get<std::string>()).string());
    op.factors.push_back(mf.is_sparse ? mf.coo
                                      : sf::CooMatrix::from_dense(mf.dense));
  }
  sf::validate(op);
  return op;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::string hadamard_schedule_json(sf::Index n) {
  sf::Json j = sf::to_json(sf::build_hadamard_schedule(n));
  j["format_version"] = sf::kFormatVersion;
  return j.dump(2) + "\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("factorize writes factors, a report, and a manifest") {
  const fs::path in = fresh_path("identity.txt");
  sf::write_dense_file(in.string(), sf::Matrix::Identity(4, 4));

  sf::SplitSchedule sched;
  sched.steps.push_back({sf::ConstraintSet::global_sparse_unit_norm(4, 4, 8),
                         sf::ConstraintSet::global_sparse_unit_norm(4, 4, 16)});
  sf::Json sj = sf::to_json(sched);
  sj["format_version"] = sf::kFormatVersion;
  sj["palm"] = sf::Json{{"max_iter", 200}};
  const fs::path sched_path = fresh_path("schedule.json");
  write_file(sched_path, sj.dump(2) + "\n");

  const fs::path out = fresh_dir("fact_out");
  const RunResult r = run_tool("factorize --input \"" + in.string() +
                               "\" --schedule \"" + sched_path.string() +
                               "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  REQUIRE(fs::exists(out / "report.json"));
  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "factor_000.txt"));
  REQUIRE(fs::exists(out / "factor_001.txt"));

  const sf::MultiLayerOperator op = load_operator(out);
  REQUIRE(op.factors.size() == 2);
  const sf::Matrix recon = sf::to_dense(op);
  CHECK(sf::frobenius_norm(recon - sf::Matrix::Identity(4, 4)) <= 1e-10);

  const sf::Json rj = read_json(out / "report.json");
  CHECK(rj.at("format_version") == sf::kFormatVersion);
  CHECK(rj.at("rmse").get<double>() <= 1e-10);
  CHECK(rj.at("config").at("max_iter") == 200);

  const sf::Json m = read_json(out / "manifest.json");
  CHECK(m.at("command") == "factorize");
  CHECK(m.at("config") == sj);  // byte-for-byte config echo
  CHECK(m.at("inputs").at("input") == in.string());
  const auto& outs = m.at("outputs");
  CHECK(std::find(outs.begin(), outs.end(), sf::Json("report.json")) !=
        outs.end());
}

TEST_CASE("factorize reproduces a structured transform from a schedule file") {
  const sf::Matrix h = sf::hadamard(8);
  const fs::path in = fresh_path("h8.txt");
  sf::write_dense_file(in.string(), h);
  const fs::path sched_path = fresh_path("h8_schedule.json");
  write_file(sched_path, hadamard_schedule_json(8));

  const fs::path out = fresh_dir("h8_out");
  const RunResult r = run_tool("factorize --input \"" + in.string() +
                               "\" --schedule \"" + sched_path.string() +
                               "\" --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);

  const sf::MultiLayerOperator op = load_operator(out);
  REQUIRE(op.factors.size() == 3);
  const double rel =
      sf::frobenius_norm(h - sf::to_dense(op)) / sf::frobenius_norm(h);
  CHECK(rel <= 1e-10);
  const sf::Json rj = read_json(out / "report.json");
  CHECK(rj.at("rc").get<double>() == 0.75);
}

TEST_CASE("a malformed input leaves no partial outputs") {
  const fs::path in = fresh_path("broken.txt");
  write_file(in, "dense 4\n1 2 3 4\n");
  const fs::path sched_path = fresh_path("schedule.json");
  write_file(sched_path, hadamard_schedule_json(4));

  const fs::path out = scratch_root() / "never_created";
  const RunResult r = run_tool("factorize --input \"" + in.string() +
                               "\" --schedule \"" + sched_path.string() +
                               "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
  CHECK(!r.err.empty());
  CHECK(!fs::exists(out));
}

TEST_CASE("a missing schedule file fails cleanly") {
  const fs::path in = fresh_path("x.txt");
  sf::write_dense_file(in.string(), sf::Matrix::Identity(4, 4));
  const RunResult r =
      run_tool("factorize --input \"" + in.string() +
               "\" --schedule /nonexistent/sched.json --out \"" +
               (scratch_root() / "nope").string() + "\"");
  CHECK(r.code == 2);
  CHECK(!fs::exists(scratch_root() / "nope"));
}

TEST_CASE("the transform demo rejects orders that are not powers of two") {
  const RunResult r =
      run_tool("hadamard-demo --n 3 --out \"" +
               (scratch_root() / "demo3").string() + "\"");
  CHECK(r.code == 2);
  CHECK(!r.err.empty());
  CHECK(!fs::exists(scratch_root() / "demo3"));
}

TEST_CASE("the order-2 demo is a single exact factor") {
  const fs::path out = fresh_dir("demo2");
  const RunResult r = run_tool("hadamard-demo --n 2 --out \"" + out.string() +
                               "\"");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());

  const sf::Json rj = read_json(out / "report.json");
  CHECK(rj.at("n") == 2);
  CHECK(rj.at("exact") == true);
  REQUIRE(rj.at("factors").size() == 1);

  const sf::MultiLayerOperator op = load_operator(out);
  CHECK(sf::frobenius_norm(sf::to_dense(op) - sf::hadamard(2)) <= 1e-10);
  CHECK(rj.at("rc").get<double>() == 1.0);
}

TEST_CASE("the order-8 demo factorizes exactly into three layers") {
  const fs::path out = fresh_dir("demo8");
  const RunResult r = run_tool("hadamard-demo --n 8 --out \"" + out.string() +
                               "\"");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.find("n=8") != std::string::npos);

  const sf::Json rj = read_json(out / "report.json");
  CHECK(rj.at("exact") == true);
  CHECK(rj.at("relative_error").get<double>() <= 1e-10);
  REQUIRE(rj.at("factors").size() == 3);
  CHECK(rj.at("rc").get<double>() == 0.75);
  for (const auto& f : rj.at("factors"))
    CHECK(f.at("triplets").size() <= 16);
}

TEST_CASE("apply multiplies through a stored operator") {
  // Hand-written operator: y = 2 * I3 * x.
  const fs::path dir = fresh_dir("op_scale2");
  sf::write_sparse_file((dir / "f0.txt").string(),
                        sf::CooMatrix::from_dense(sf::Matrix::Identity(3, 3)));
  write_file(dir / "report.json",
             sf::Json{{"scale", 2.0}, {"factor_files", {"f0.txt"}}}.dump(2));

  const fs::path vec = fresh_path("v.txt");
  sf::Matrix v(3, 1);
  v << 1.0, 2.0, 3.0;
  sf::write_dense_file(vec.string(), v);

  const RunResult r = run_tool("apply --op \"" + dir.string() + "\" --vec \"" +
                               vec.string() + "\"");
  REQUIRE(r.code == 0);
  std::istringstream out(r.out);
  const sf::MatrixFile y = sf::read_matrix(out);
  REQUIRE(!y.is_sparse);
  REQUIRE(y.dense.rows() == 3);
  REQUIRE(y.dense.cols() == 1);
  CHECK(y.dense(0, 0) == 2.0);
  CHECK(y.dense(1, 0) == 4.0);
  CHECK(y.dense(2, 0) == 6.0);
}

TEST_CASE("apply agrees with the dense transform on a demo output") {
  const fs::path out = fresh_dir("demo8_apply");
  REQUIRE(run_tool("hadamard-demo --n 8 --out \"" + out.string() + "\"").code ==
          0);

  const fs::path vec = fresh_path("e1.txt");
  sf::Matrix e1 = sf::Matrix::Zero(8, 1);
  e1(0, 0) = 1.0;
  sf::write_dense_file(vec.string(), e1);

  const RunResult r = run_tool("apply --op \"" + out.string() + "\" --vec \"" +
                               vec.string() + "\"");
  REQUIRE(r.code == 0);
  std::istringstream stream(r.out);
  const sf::MatrixFile y = sf::read_matrix(stream);
  REQUIRE(y.dense.rows() == 8);
  // The first column of the order-8 transform is all ones.
  for (sf::Index i = 0; i < 8; ++i)
    CHECK(y.dense(i, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("apply rejects truncated factors and mismatched shapes") {
  const fs::path dir = fresh_dir("op_broken");
  write_file(dir / "report.json",
             sf::Json{{"scale", 1.0}, {"factor_files", {"f0.txt"}}}.dump(2));
  write_file(dir / "f0.txt", "sparse 3 3 5\n0 0 1.0\n");  // claims 5, has 1

  const fs::path vec = fresh_path("v3.txt");
  sf::Matrix v(3, 1);
  v << 1.0, 2.0, 3.0;
  sf::write_dense_file(vec.string(), v);

  RunResult r = run_tool("apply --op \"" + dir.string() + "\" --vec \"" +
                         vec.string() + "\"");
  CHECK(r.code == 2);
  CHECK(!r.err.empty());

  // Fix the factor but feed a vector of the wrong length.
  sf::write_sparse_file((dir / "f0.txt").string(),
                        sf::CooMatrix::from_dense(sf::Matrix::Identity(3, 3)));
  const fs::path vec4 = fresh_path("v4.txt");
  sf::write_dense_file(vec4.string(), sf::Matrix::Ones(4, 1));
  r = run_tool("apply --op \"" + dir.string() + "\" --vec \"" + vec4.string() +
               "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("dimension mismatch") != std::string::npos);

  // No report at all.
  r = run_tool("apply --op \"" + fresh_dir("op_empty").string() +
               "\" --vec \"" + vec.string() + "\"");
  CHECK(r.code == 2);
}

TEST_CASE("the experiment sweep writes one line per trial and one row per cell") {
  const sf::Json cfg = {
      {"format_version", 1},
      {"data",
       {{"d", 8},
        {"n", 20},
        {"atoms_per_sample", 2},
        {"dict_kind", "factorized"},
        {"factor_count", 2},
        {"nnz_range", {16, 24}}}},
      {"grid", {{"Q", {3}}, {"p", {2}}, {"P", {64}}}},
      {"palm", {{"max_iter", 30}}}};
  const fs::path cfg_path = fresh_path("exp.json");
  write_file(cfg_path, cfg.dump(2) + "\n");

  const fs::path out = fresh_dir("exp_out");
  const RunResult r =
      run_tool("experiment --config \"" + cfg_path.string() +
               "\" --trials 5 --seed 42 --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());

  const auto lines = nonempty_lines(slurp(out / "results.jsonl"));
  REQUIRE(lines.size() == 5);
  std::vector<std::uint64_t> seeds;
  double rc_sum = 0.0, rmse_sum = 0.0;
  for (const std::string& line : lines) {
    const sf::Json j = sf::Json::parse(line);
    CHECK(j.at("Q") == 3);
    CHECK(j.at("p") == 2);
    CHECK(j.at("P") == 64);
    CHECK(j.at("rmse").is_number());
    CHECK(j.at("rc").is_number());
    CHECK(j.at("wall_ms").is_number());
    seeds.push_back(j.at("seed").get<std::uint64_t>());
    rc_sum += j.at("rc").get<double>();
    rmse_sum += j.at("rmse").get<double>();
  }
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());

  const auto csv = nonempty_lines(slurp(out / "plot_data.csv"));
  REQUIRE(csv.size() == 2);
  CHECK(csv[0] == "Q,p,P,mean_rc,mean_rmse");
  std::istringstream row(csv[1]);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 5);
  CHECK(fields[0] == "3");
  CHECK(fields[1] == "2");
  CHECK(fields[2] == "64");
  CHECK(std::stod(fields[3]) == rc_sum / 5.0);
  CHECK(std::stod(fields[4]) == rmse_sum / 5.0);

  const sf::Json m = read_json(out / "manifest.json");
  CHECK(m.at("seed") == 42);
  CHECK(m.at("trials") == 5);
  CHECK(m.at("config").at("data").at("dict_kind") == "factorized");
  REQUIRE(m.at("cells").size() == 1);
  CHECK(m.at("cells")[0].at("schedule") ==
        sf::to_json(sf::build_experiment_schedule(8, 20, 3, 2, 64, 2)));
}

TEST_CASE("experiment reruns with the same seed match except for timings") {
  const sf::Json cfg = {
      {"format_version", 1},
      {"data",
       {{"d", 6},
        {"n", 12},
        {"atoms_per_sample", 2},
        {"dict_kind", "FACT"},
        {"factor_count", 2},
        {"nnz_range", {12, 18}}}},
      {"grid", {{"Q", {3}}, {"p", {2}}, {"P", {24}}}},
      {"palm", {{"max_iter", 20}}}};
  const fs::path cfg_path = fresh_path("exp_repro.json");
  write_file(cfg_path, cfg.dump(2) + "\n");

  const fs::path out_a = fresh_dir("repro_a");
  const fs::path out_b = fresh_dir("repro_b");
  const std::string tail = "\" --trials 2 --seed 7 --out \"";
  REQUIRE(run_tool("experiment --config \"" + cfg_path.string() + tail +
                   out_a.string() + "\"")
              .code == 0);
  REQUIRE(run_tool("experiment --config \"" + cfg_path.string() + tail +
                   out_b.string() + "\"")
              .code == 0);

  const auto la = nonempty_lines(slurp(out_a / "results.jsonl"));
  const auto lb = nonempty_lines(slurp(out_b / "results.jsonl"));
  REQUIRE(la.size() == lb.size());
  for (size_t i = 0; i < la.size(); ++i) {
    sf::Json a = sf::Json::parse(la[i]);
    sf::Json b = sf::Json::parse(lb[i]);
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a == b);
  }
  CHECK(slurp(out_a / "plot_data.csv") == slurp(out_b / "plot_data.csv"));
}

TEST_CASE("experiment validates its configuration and flags") {
  const fs::path out = scratch_root() / "exp_invalid";

  // Missing --seed is a usage error.
  const sf::Json cfg = {{"format_version", 1},
                        {"grid", {{"Q", {3}}, {"p", {2}}, {"P", {16}}}},
                        {"data", {{"d", 4}, {"n", 6}, {"atoms_per_sample", 2},
                                  {"nnz_range", {8, 12}}}}};
  const fs::path cfg_path = fresh_path("exp_bad.json");
  write_file(cfg_path, cfg.dump(2) + "\n");
  RunResult r = run_tool("experiment --config \"" + cfg_path.string() +
                         "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 2);

  // Unknown config key.
  sf::Json bad = cfg;
  bad["bogus"] = 1;
  const fs::path bad_path = fresh_path("exp_unknown.json");
  write_file(bad_path, bad.dump(2) + "\n");
  r = run_tool("experiment --config \"" + bad_path.string() +
               "\" --seed 1 --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("config read:") != std::string::npos);

  // Missing format_version.
  sf::Json unversioned = cfg;
  unversioned.erase("format_version");
  const fs::path uv_path = fresh_path("exp_unversioned.json");
  write_file(uv_path, unversioned.dump(2) + "\n");
  r = run_tool("experiment --config \"" + uv_path.string() +
               "\" --seed 1 --out \"" + out.string() + "\"");
  CHECK(r.code == 2);

  // Zero trials.
  r = run_tool("experiment --config \"" + cfg_path.string() +
               "\" --trials 0 --seed 1 --out \"" + out.string() + "\"");
  CHECK(r.code == 2);
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_tool("").code == 2);
  CHECK(run_tool("bogus-subcommand").code == 2);
  CHECK(run_tool("factorize --input x").code == 2);
  const RunResult help = run_tool("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("factorize") != std::string::npos);
}

}  // TEST_SUITE
