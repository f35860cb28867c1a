// Command line front end: factorize a matrix from a schedule file, run the
// scaled Hadamard demo, sweep the synthetic dictionary-learning experiment
// grid, or apply a stored operator to a vector.  Data goes to files or to
// stdout; diagnostics go to stderr.  Exit codes: 0 success, 2 bad
// configuration or input, 3 numerical abort.

#include "sparsefact/dictlearn.hpp"
#include "sparsefact/hadamard.hpp"
#include "sparsefact/io.hpp"
#include "sparsefact/metrics.hpp"
#include "sparsefact/serialize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace sf = sparsefact;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

sf::Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return sf::Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json_file(const fs::path& path, const sf::Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

sf::Json manifest_base(const std::string& command) {
  sf::Json m;
  m["format_version"] = sf::kFormatVersion;
  m["tool_version"] = sf::kToolVersion;
  m["command"] = command;
  return m;
}

std::string factor_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "factor_%03zu.txt", i);
  return buf;
}

// Writes the factors plus report.json; returns the report JSON actually
// written so callers can reuse it in the manifest.
sf::Json write_operator_dir(const fs::path& dir,
                            const sf::FactorizationReport& rep,
                            sf::Json extra) {
  fs::create_directories(dir);
  sf::Json files = sf::Json::array();
  for (std::size_t i = 0; i < rep.op.factors.size(); ++i) {
    const std::string name = factor_name(i);
    sf::write_sparse_file((dir / name).string(), rep.op.factors[i]);
    files.push_back(name);
  }
  sf::Json rj = sf::to_json(rep);
  rj["factor_files"] = files;
  rj.update(extra);
  write_json_file(dir / "report.json", rj);
  return rj;
}

int cmd_factorize(const std::string& input, const std::string& schedule_path,
                  const std::string& out_dir) {
  const sf::Json sj = read_json_file(schedule_path);
  const sf::ScheduleFile sched = sf::schedule_file_from_json(sj);
  const sf::Matrix x = sf::as_dense(sf::read_matrix_file(input));

  const sf::FactorizationReport rep = sf::hierarchical_factorize(
      x, sched.schedule, sched.palm, sched.rc_dict_factors);

  // All validation and the optimization itself happen before anything is
  // written, so a failed run leaves no partial outputs behind.
  write_operator_dir(out_dir, rep, sf::Json::object());

  sf::Json m = manifest_base("factorize");
  m["inputs"] = {{"input", input}, {"schedule", schedule_path}};
  m["config"] = sj;
  sf::Json outs = sf::Json::array();
  for (std::size_t i = 0; i < rep.op.factors.size(); ++i)
    outs.push_back(factor_name(i));
  outs.push_back("report.json");
  m["outputs"] = outs;
  write_json_file(fs::path(out_dir) / "manifest.json", m);
  return 0;
}

int cmd_hadamard_demo(long long n, const std::string& out_dir) {
  if (n < 2 || n > 1024 || (n & (n - 1)) != 0)
    throw std::runtime_error("n must be a power of two in [2, 1024]");

  const sf::Matrix h = sf::hadamard(n);
  sf::PalmConfig cfg;
  // The butterfly factorization is exact, so polish until the iterates hit
  // the floating-point floor instead of stopping at the looser default.
  cfg.obj_tol = 1e-12;
  sf::FactorizationReport rep;
  if (n == 2) {
    // log2(2) = 1 factor: nothing to split, a single constrained run.
    const auto t0 = std::chrono::steady_clock::now();
    sf::PalmState st = sf::palm_factorize(
        h, {sf::ConstraintSet::global_sparse_unit_norm(n, n, 2 * n)}, {}, cfg);
    rep.op.scale = st.scale;
    rep.op.factors = st.factors;
    rep.split_traces.push_back(st.objective_trace);
    rep.rmse_value = sf::rmse(h, sf::to_dense(rep.op));
    rep.rc = sf::relative_complexity(rep.op, n, n);
    rep.config = cfg;
    rep.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  } else {
    rep = sf::hierarchical_factorize(h, sf::build_hadamard_schedule(n), cfg);
  }

  const double rel =
      sf::frobenius_norm(h - sf::to_dense(rep.op)) / sf::frobenius_norm(h);
  sf::Json extra;
  extra["n"] = n;
  extra["relative_error"] = rel;
  extra["exact"] = rel <= 1e-10;
  write_operator_dir(out_dir, rep, extra);

  sf::Json m = manifest_base("hadamard-demo");
  m["inputs"] = {{"n", n}};
  sf::Json outs = sf::Json::array();
  for (std::size_t i = 0; i < rep.op.factors.size(); ++i)
    outs.push_back(factor_name(i));
  outs.push_back("report.json");
  m["outputs"] = outs;
  write_json_file(fs::path(out_dir) / "manifest.json", m);

  std::cerr << "n=" << n << " factors=" << rep.op.factors.size()
            << " relative_error=" << rel << " exact=" << (rel <= 1e-10)
            << " wall_ms=" << rep.wall_ms << "\n";
  return 0;
}

struct ExperimentConfig {
  sf::SynthSpec data;
  std::vector<sf::Index> qs{3, 4, 5, 6};
  std::vector<sf::Index> ps{2, 3, 4};
  std::vector<sf::Index> caps;  // defaults to round(512 * {1, 1.2, 1.4, 1.6})
  sf::PalmConfig palm;
};

std::vector<sf::Index> default_caps() {
  std::vector<sf::Index> caps;
  for (const double m : {1.0, 1.2, 1.4, 1.6})
    caps.push_back(static_cast<sf::Index>(std::lround(512.0 * m)));
  return caps;
}

[[noreturn]] void config_fail(const std::string& what) {
  throw std::runtime_error("config read: " + what);
}

void require_keys(const sf::Json& j,
                  std::initializer_list<const char*> allowed,
                  const char* ctx) {
  if (!j.is_object()) config_fail(std::string(ctx) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) config_fail(std::string(ctx) + ": unknown key \"" + key + "\"");
  }
}

sf::Index positive_index(const sf::Json& j, const char* ctx) {
  if (!j.is_number_integer() || j.get<long long>() <= 0)
    config_fail(std::string(ctx) + " must be a positive integer");
  return static_cast<sf::Index>(j.get<long long>());
}

std::vector<sf::Index> index_list(const sf::Json& j, const char* ctx) {
  if (!j.is_array() || j.empty())
    config_fail(std::string(ctx) + " must be a non-empty array");
  std::vector<sf::Index> out;
  for (const auto& v : j) out.push_back(positive_index(v, ctx));
  return out;
}

sf::SynthSpec data_spec_from_json(const sf::Json& j) {
  require_keys(j,
               {"d", "n", "atoms_per_sample", "dict_kind", "factor_count",
                "nnz_range"},
               "data");
  sf::SynthSpec spec;
  if (j.contains("d")) spec.d = positive_index(j.at("d"), "data.d");
  if (j.contains("n")) spec.n = positive_index(j.at("n"), "data.n");
  if (j.contains("atoms_per_sample"))
    spec.atoms_per_sample =
        positive_index(j.at("atoms_per_sample"), "data.atoms_per_sample");
  if (j.contains("dict_kind")) {
    const auto& k = j.at("dict_kind");
    if (!k.is_string()) config_fail("data.dict_kind must be a string");
    const std::string s = k.get<std::string>();
    if (s == "factorized" || s == "FACT")
      spec.kind = sf::DictKind::Factorized;
    else if (s == "gaussian" || s == "RAND")
      spec.kind = sf::DictKind::Gaussian;
    else
      config_fail("data.dict_kind: expected \"factorized\" or \"gaussian\"");
  }
  if (j.contains("factor_count"))
    spec.factor_count = positive_index(j.at("factor_count"), "data.factor_count");
  if (j.contains("nnz_range")) {
    const auto& r = j.at("nnz_range");
    if (!r.is_array() || r.size() != 2)
      config_fail("data.nnz_range must be [min, max]");
    spec.nnz_min = positive_index(r[0], "data.nnz_range");
    spec.nnz_max = positive_index(r[1], "data.nnz_range");
  }
  if (spec.atoms_per_sample > spec.d)
    config_fail("data.atoms_per_sample exceeds data.d");
  if (spec.nnz_min > spec.nnz_max || spec.nnz_max > spec.d * spec.d)
    config_fail("data.nnz_range out of order or above d*d");
  return spec;
}

ExperimentConfig experiment_config_from_json(const sf::Json& j) {
  require_keys(j, {"format_version", "data", "grid", "palm"}, "config");
  if (!j.contains("format_version") ||
      j.at("format_version") != sf::kFormatVersion)
    config_fail("config requires format_version 1");
  ExperimentConfig cfg;
  cfg.caps = default_caps();
  if (j.contains("data")) cfg.data = data_spec_from_json(j.at("data"));
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    require_keys(g, {"Q", "p", "P"}, "grid");
    if (g.contains("Q")) cfg.qs = index_list(g.at("Q"), "grid.Q");
    if (g.contains("p")) cfg.ps = index_list(g.at("p"), "grid.p");
    if (g.contains("P")) cfg.caps = index_list(g.at("P"), "grid.P");
  }
  if (j.contains("palm")) cfg.palm = sf::palm_config_from_json(j.at("palm"));
  for (const sf::Index q : cfg.qs)
    if (q < 2) config_fail("grid.Q entries must be at least 2");
  return cfg;
}

sf::Json resolved_config_json(const ExperimentConfig& cfg) {
  sf::Json data;
  data["d"] = cfg.data.d;
  data["n"] = cfg.data.n;
  data["atoms_per_sample"] = cfg.data.atoms_per_sample;
  data["dict_kind"] =
      cfg.data.kind == sf::DictKind::Factorized ? "factorized" : "gaussian";
  data["factor_count"] = cfg.data.factor_count;
  data["nnz_range"] = {cfg.data.nnz_min, cfg.data.nnz_max};
  sf::Json grid;
  grid["Q"] = cfg.qs;
  grid["p"] = cfg.ps;
  grid["P"] = cfg.caps;
  sf::Json out;
  out["format_version"] = sf::kFormatVersion;
  out["data"] = data;
  out["grid"] = grid;
  out["palm"] = sf::to_json(cfg.palm);
  return out;
}

int cmd_experiment(const std::string& config_path, int trials,
                   std::uint64_t seed, const std::string& out_dir) {
  const ExperimentConfig cfg =
      experiment_config_from_json(read_json_file(config_path));
  if (trials < 1) throw std::runtime_error("--trials must be at least 1");

  fs::create_directories(out_dir);
  std::ofstream jsonl(fs::path(out_dir) / "results.jsonl");
  std::ofstream csv(fs::path(out_dir) / "plot_data.csv");
  if (!jsonl || !csv) throw std::runtime_error("cannot write to " + out_dir);
  csv << "Q,p,P,mean_rc,mean_rmse\n";

  bool any_abort = false;
  sf::Json cells = sf::Json::array();
  for (const sf::Index q : cfg.qs) {
    for (const sf::Index p : cfg.ps) {
      for (const sf::Index cap : cfg.caps) {
        const sf::SplitSchedule schedule = sf::build_experiment_schedule(
            cfg.data.d, cfg.data.n, q, p, cap, cfg.data.atoms_per_sample);
        cells.push_back({{"Q", q},
                         {"p", p},
                         {"P", cap},
                         {"schedule", sf::to_json(schedule)}});
        double rc_sum = 0.0, rmse_sum = 0.0;
        int done = 0;
        for (int trial = 0; trial < trials; ++trial) {
          // The stream id depends only on the cell coordinates and trial
          // index, so shrinking the grid never reshuffles seeds.
          const std::uint64_t stream = sf::Rng::mix(
              sf::Rng::mix(sf::Rng::mix(static_cast<std::uint64_t>(q),
                                        static_cast<std::uint64_t>(p)),
                           static_cast<std::uint64_t>(cap)),
              static_cast<std::uint64_t>(trial));
          const std::uint64_t trial_seed = sf::Rng::mix(seed, stream);
          sf::Rng rng(trial_seed);
          const sf::SynthDictionary dict = sf::synth_dictionary(cfg.data, rng);
          const sf::SynthData data = sf::synth_training_data(
              dict.d0, cfg.data.n, cfg.data.atoms_per_sample, rng);
          sf::Json line;
          line["seed"] = trial_seed;
          line["Q"] = q;
          line["p"] = p;
          line["P"] = cap;
          try {
            const sf::FactorizationReport rep = sf::proposed_learn(
                data.x, q, p, cap, cfg.palm, trial_seed,
                cfg.data.atoms_per_sample);
            line["rmse"] = rep.rmse_value;
            line["rc"] = rep.rc;
            line["wall_ms"] = rep.wall_ms;
            rc_sum += rep.rc;
            rmse_sum += rep.rmse_value;
            ++done;
          } catch (const sf::NumericalAbort& e) {
            line["error"] = e.what();
            any_abort = true;
            std::cerr << "trial aborted (Q=" << q << " p=" << p
                      << " P=" << cap << " trial=" << trial
                      << "): " << e.what() << "\n";
          }
          jsonl << line.dump() << "\n";
        }
        if (done > 0)
          csv << q << "," << p << "," << cap << ","
              << sf::format_value(rc_sum / done) << ","
              << sf::format_value(rmse_sum / done) << "\n";
      }
    }
  }
  jsonl.close();
  csv.close();
  if (!jsonl || !csv) throw std::runtime_error("write failed in " + out_dir);

  sf::Json m = manifest_base("experiment");
  m["inputs"] = {{"config", config_path}};
  m["seed"] = seed;
  m["trials"] = trials;
  m["config"] = resolved_config_json(cfg);
  m["cells"] = cells;
  m["outputs"] = {"results.jsonl", "plot_data.csv"};
  write_json_file(fs::path(out_dir) / "manifest.json", m);

  return any_abort ? kExitNumerical : 0;
}

int cmd_apply(const std::string& op_dir, const std::string& vec_path) {
  const fs::path dir(op_dir);
  const sf::Json rj = read_json_file((dir / "report.json").string());
  if (!rj.contains("scale") || !rj.at("scale").is_number())
    throw std::runtime_error("report.json: missing numeric \"scale\"");
  if (!rj.contains("factor_files") || !rj.at("factor_files").is_array() ||
      rj.at("factor_files").empty())
    throw std::runtime_error("report.json: missing \"factor_files\" list");

  sf::MultiLayerOperator op;
  op.scale = rj.at("scale").get<double>();
  for (const auto& f : rj.at("factor_files")) {
    if (!f.is_string())
      throw std::runtime_error("report.json: factor_files entries must be strings");
    const sf::MatrixFile mf =
        sf::read_matrix_file((dir / f.get<std::string>()).string());
    op.factors.push_back(mf.is_sparse ? mf.coo
                                      : sf::CooMatrix::from_dense(mf.dense));
  }
  sf::validate(op);

  const sf::Matrix vm = sf::as_dense(sf::read_matrix_file(vec_path));
  if (vm.cols() != 1)
    throw std::runtime_error("vector file must be a single dense column");
  if (vm.rows() != op.factors.back().cols())
    throw std::runtime_error(
        "dimension mismatch: vector length " + std::to_string(vm.rows()) +
        " vs operator input " + std::to_string(op.factors.back().cols()));

  const sf::Vector y = sf::apply(op, vm.col(0));
  sf::write_dense(std::cout, y);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-layer sparse matrix factorization tool"};
  app.require_subcommand(1);

  std::string input, schedule_path, out_dir, config_path, op_dir, vec_path;
  long long demo_n = 0;
  int trials = 10;
  std::uint64_t seed = 0;

  CLI::App* fac = app.add_subcommand(
      "factorize", "Factorize a matrix file with a schedule config");
  fac->add_option("--input", input, "matrix file")->required();
  fac->add_option("--schedule", schedule_path, "schedule JSON")->required();
  fac->add_option("--out", out_dir, "output directory")->required();

  CLI::App* demo = app.add_subcommand(
      "hadamard-demo", "Factorize the order-n Hadamard matrix");
  demo->add_option("--n", demo_n, "matrix order (power of two, 2..1024)")
      ->required();
  demo->add_option("--out", out_dir, "output directory")->required();

  CLI::App* exp = app.add_subcommand(
      "experiment", "Run the synthetic dictionary-learning grid");
  exp->add_option("--config", config_path, "experiment config JSON")
      ->required();
  exp->add_option("--trials", trials, "trials per grid cell");
  exp->add_option("--seed", seed, "master seed (required, no clock seeding)")
      ->required();
  exp->add_option("--out", out_dir, "output directory")->required();

  CLI::App* apl = app.add_subcommand(
      "apply", "Apply a stored operator to a vector file");
  apl->add_option("--op", op_dir, "operator directory (factorize output)")
      ->required();
  apl->add_option("--vec", vec_path, "vector file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (fac->parsed()) return cmd_factorize(input, schedule_path, out_dir);
    if (demo->parsed()) return cmd_hadamard_demo(demo_n, out_dir);
    if (exp->parsed()) return cmd_experiment(config_path, trials, seed, out_dir);
    if (apl->parsed()) return cmd_apply(op_dir, vec_path);
  } catch (const sf::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
