#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ipd/dataset.hpp"
#include "ipd/error.hpp"
#include "ipd/formula.hpp"
#include "ipd/methods.hpp"
#include "ipd/report.hpp"
#include "ipd/simdat.hpp"
#include "ipd/study.hpp"

namespace ipd::cli {
namespace {

constexpr int kUsage = 2;

struct SimFlags {
  std::string sizes = "100,100,1000";
  double effect = 1.0;
  double sigma_y = 4.0;
  std::string model = "ols";
  std::uint64_t seed = 0;
};

struct SimulateFlags {
  SimFlags sim;
  std::string out;
};

struct FitFlags {
  std::string formula;
  std::string method;
  std::string model;
  std::string data;
  std::string labeled;
  std::string unlabeled;
  std::string label = "set";
  double alpha = 0.05;
  std::optional<double> q;
  int nboot = 200;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> omega;
  bool no_lambda_clip = false;
  std::optional<std::string> target_term;
  std::string format = "json";
  std::string augment_out;
};

struct BenchmarkFlags {
  SimFlags sim;
  std::size_t replicates = 500;
  unsigned jobs = 1;
  int nboot = 200;
  double alpha = 0.05;
  std::string out;
  std::string replicates_out;
};

Error io_error(const std::string& msg) { return Error(ErrorCategory::kData, "io_error", msg); }

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open `" + path + "` for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open `" + path + "` for writing");
  return out;
}

SimConfig to_sim_config(const SimFlags& f) {
  SimConfig c;
  std::vector<std::size_t> sizes;
  std::stringstream ss(f.sizes);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError("--n expects three comma-separated counts, got `" + f.sizes + "`");
    }
  }
  if (sizes.size() != 3) {
    throw ConfigError("--n expects three comma-separated counts, got `" + f.sizes + "`");
  }
  c.n_training = sizes[0];
  c.n_labeled = sizes[1];
  c.n_unlabeled = sizes[2];
  c.effect = f.effect;
  c.sigma_y = f.sigma_y;
  c.model = parse_estimand(f.model);
  c.seed = f.seed;
  validate(c);
  return c;
}

void add_sim_flags(CLI::App* app, SimFlags& f) {
  app->add_option("--n", f.sizes, "training,labeled,unlabeled row counts")
      ->capture_default_str();
  app->add_option("--effect", f.effect, "coefficient on X1")->capture_default_str();
  app->add_option("--sigma-y", f.sigma_y, "outcome noise SD")->capture_default_str();
  app->add_option("--seed", f.seed, "random seed")->required();
}

int cmd_simulate(const SimulateFlags& flags, std::ostream& out) {
  const auto config = to_sim_config(flags.sim);
  const auto data = simdat(config);
  auto file = open_out(flags.out);
  write_csv(file, data);
  if (!file) throw io_error("failed writing `" + flags.out + "`");
  out << "wrote " << data.rows() << " rows to " << flags.out << " (training "
      << data.count(RowLabel::kTraining) << ", labeled " << data.count(RowLabel::kLabeled)
      << ", unlabeled " << data.count(RowLabel::kUnlabeled) << ")\n";
  return 0;
}

int cmd_fit(const FitFlags& flags, std::ostream& out) {
  const auto formula = parse_formula(flags.formula);
  MethodConfig config;
  config.method = parse_method(flags.method);
  config.estimand = parse_estimand(flags.model);
  config.alpha = flags.alpha;
  config.q = flags.q;
  config.nboot = flags.nboot;
  config.lambda_clip = !flags.no_lambda_clip;
  config.fixed_lambda = flags.lambda;
  config.fixed_omega = flags.omega;
  config.target_term = flags.target_term;
  if (config.method == Method::kPostpiBoot) {
    if (!flags.seed) throw ConfigError("--seed is required for method postpi_boot");
  }
  config.seed = flags.seed.value_or(0);
  validate(config, formula);
  if (flags.format != "json" && flags.format != "summary" && flags.format != "print") {
    throw ConfigError("--format must be json, summary, or print");
  }

  const bool separate = !flags.labeled.empty() || !flags.unlabeled.empty();
  if (separate == !flags.data.empty()) {
    throw ConfigError("give either --data or both --labeled and --unlabeled");
  }
  std::optional<StackedDataset> data;
  if (separate) {
    if (flags.labeled.empty() || flags.unlabeled.empty()) {
      throw ConfigError("--labeled and --unlabeled must be given together");
    }
    auto lin = open_in(flags.labeled);
    auto uin = open_in(flags.unlabeled);
    data.emplace(stack_separate(read_frame_csv(lin), read_frame_csv(uin), formula, flags.label));
  } else {
    auto in = open_in(flags.data);
    data.emplace(load_stacked(in, flags.label, formula));
  }

  const auto fit = fit_ipd(formula, *data, config);
  if (flags.format == "json") {
    out << fit_to_json(fit) << '\n';
  } else if (flags.format == "summary") {
    out << render_summary(fit);
  } else {
    out << render_print(fit);
  }
  if (!flags.augment_out.empty()) {
    auto file = open_out(flags.augment_out);
    write_csv(file, augment(fit, *data));
  }
  return 0;
}

int cmd_benchmark(const BenchmarkFlags& flags, std::ostream& out) {
  StudyConfig config;
  config.sim = to_sim_config(flags.sim);
  config.replicates = flags.replicates;
  config.jobs = flags.jobs;
  config.nboot = flags.nboot;
  config.alpha = flags.alpha;
  config.seed = flags.sim.seed;
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (config.nboot < 2) throw ConfigError("nboot must be at least 2");
  if (flags.jobs < 1) throw ConfigError("--jobs must be at least 1");

  const auto report = run_study(config);
  {
    auto file = open_out(flags.out);
    write_report_csv(file, report);
  }
  if (!flags.replicates_out.empty()) {
    auto file = open_out(flags.replicates_out);
    write_replicates_csv(file, report);
  }
  write_report_csv(out, report);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inference on predicted data: simulate, fit, and benchmark IPD estimators", "ipd"};
  app.require_subcommand(1);

  SimulateFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "write a simulated stacked dataset");
  add_sim_flags(simulate, sim_flags.sim);
  simulate->add_option("--model", sim_flags.sim.model, "mean, quantile, ols, or logistic")
      ->capture_default_str();
  simulate->add_option("--out", sim_flags.out, "output CSV path")->required();

  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit one method and print glance/tidy JSON");
  fit->add_option("--formula", fit_flags.formula, "e.g. \"Y - f ~ X1\"")->required();
  fit->add_option("--method", fit_flags.method,
                  "postpi_boot, ppi, ppi_plusplus, pspa, oracle, naive, classic")
      ->required();
  fit->add_option("--model", fit_flags.model, "mean, quantile, ols, or logistic")->required();
  fit->add_option("--data", fit_flags.data, "stacked CSV with a label column");
  fit->add_option("--labeled", fit_flags.labeled, "labeled-only CSV");
  fit->add_option("--unlabeled", fit_flags.unlabeled, "unlabeled-only CSV");
  fit->add_option("--label", fit_flags.label, "label column name")->capture_default_str();
  fit->add_option("--alpha", fit_flags.alpha, "1 - confidence level")->capture_default_str();
  fit->add_option("--q", fit_flags.q, "quantile level");
  fit->add_option("--nboot", fit_flags.nboot, "bootstrap replicates (postpi_boot)")
      ->capture_default_str();
  fit->add_option("--seed", fit_flags.seed, "random seed (required for postpi_boot)");
  fit->add_option("--lambda", fit_flags.lambda, "pin the ppi_plusplus tuning parameter");
  fit->add_option("--omega", fit_flags.omega, "pin the pspa weights");
  fit->add_flag("--no-lambda-clip", fit_flags.no_lambda_clip, "do not clip lambda to [0, 1]");
  fit->add_option("--target-term", fit_flags.target_term,
                  "coefficient whose variance ppi_plusplus minimizes");
  fit->add_option("--format", fit_flags.format, "json, summary, or print")->capture_default_str();
  fit->add_option("--augment", fit_flags.augment_out, "write data with .fitted/.resid to CSV");

  BenchmarkFlags bench_flags;
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo coverage and width study");
  add_sim_flags(bench, bench_flags.sim);
  bench->add_option("--replicates", bench_flags.replicates, "simulated datasets")
      ->capture_default_str();
  bench->add_option("--jobs", bench_flags.jobs, "worker threads")->capture_default_str();
  bench->add_option("--nboot", bench_flags.nboot, "postpi_boot bootstrap replicates")
      ->capture_default_str();
  bench->add_option("--alpha", bench_flags.alpha, "1 - confidence level")->capture_default_str();
  bench->add_option("--out", bench_flags.out, "study report CSV")->required();
  bench->add_option("--replicates-out", bench_flags.replicates_out,
                    "per-replicate long-format CSV");

  std::vector<std::string> argv_store{"ipd"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  const bool is_fit = fit->parsed();
  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags, out);
    if (is_fit) return cmd_fit(fit_flags, out);
    return cmd_benchmark(bench_flags, out);
  } catch (const Error& e) {
    if (is_fit) {
      err << error_to_json(e.kind(), e.what()) << '\n';
    } else {
      err << e.kind() << ": " << e.what() << '\n';
    }
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    if (is_fit) {
      err << error_to_json("internal", e.what()) << '\n';
    } else {
      err << "internal: " << e.what() << '\n';
    }
    return 4;
  }
}

}  // namespace ipd::cli
