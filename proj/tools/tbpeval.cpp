// Command-line front end: simulate the synthetic populations, print the
// exact oracles, evaluate predictors on CSV data, and sweep confounding
// strength. Emits plot-ready curve CSVs and JSON reports.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tbp/bias.hpp"
#include "tbp/errors.hpp"
#include "tbp/estimate.hpp"
#include "tbp/io.hpp"
#include "tbp/metrics.hpp"
#include "tbp/pop1.hpp"
#include "tbp/pop2.hpp"
#include "tbp/simulate.hpp"

namespace fs = std::filesystem;
using tbp::Json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kEstimation = 4;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot open output file: " + path.string());
  return os;
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open file: " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw tbp::ValidationError("invalid JSON in " + path + ": " + e.what());
  }
}

void emit_report(const Json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    auto os = open_output(out_path);
    os << report.dump(2) << "\n";
    if (!os) throw IoFailure("failed writing " + out_path);
  }
}

std::string write_curve_file(const fs::path& dir, const std::string& name,
                             const tbp::CurvePoints& curve) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  auto os = open_output(path);
  const tbp::CurvePoints curves[] = {curve};
  tbp::write_curve_csv(curves, os);
  if (!os) throw IoFailure("failed writing " + path.string());
  return path.string();
}

tbp::Pop1TbpKind parse_tbp(const std::string& name) {
  const auto kind = tbp::pop1_tbp_from_string(name);
  if (!kind) throw tbp::ValidationError("unknown predictor '" + name + "' (use h1, h2, h3)");
  return *kind;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string pop_path;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  bool retain_counterfactuals = false;
  std::string tbp;
};

int cmd_simulate(const SimulateArgs& args) {
  const Json pop = read_json_file(args.pop_path);
  tbp::SimulateOptions options;
  options.n = args.n;
  options.seed = args.seed;
  options.retain_counterfactuals = args.retain_counterfactuals;

  tbp::Sample sample;
  std::string name;
  if (pop.contains("alpha0")) {
    const auto spec = tbp::validate_pop1_spec(tbp::pop1_spec_from_json(pop));
    if (!args.tbp.empty()) options.tbp = parse_tbp(args.tbp);
    sample = tbp::simulate(spec, options);
    name = "pop1";
  } else {
    sample = tbp::simulate(tbp::pop2_spec_from_json(pop), options);
    name = "pop2";
  }

  auto os = open_output(args.out_path);
  tbp::write_sample_csv(sample, os);
  if (!os) throw IoFailure("failed writing " + args.out_path);
  std::cerr << "simulated n=" << args.n << " seed=" << args.seed << " population=" << name
            << " -> " << args.out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string pop;
  std::string spec_path;
  std::string tbp = "h3";
  double beta1 = 0;
  bool beta1_set = false;
  std::string out_path;
  std::string out_dir = ".";
};

int cmd_oracle(const OracleArgs& args) {
  const fs::path dir(args.out_dir);
  Json report;

  if (args.pop == "pop2") {
    const auto adjusted = tbp::pop2_metrics(true);
    const auto naive = tbp::pop2_metrics(false);

    report["population"] = "pop2";
    report["tbp"] = "h";
    report["n"] = 0;
    report["method"] = "exact";
    report["adjusted"] = tbp::metric_report_json(adjusted.h);
    report["naive"] = tbp::metric_report_json(naive.h);
    report["adjusted_tau_s"] = tbp::metric_report_json(*adjusted.tau_s);

    const auto adj_cal = tbp::pop2_calibration_curve(true);
    const auto nai_cal = tbp::pop2_calibration_curve(false);
    std::vector<tbp::DeviationPoint> dev;
    dev.reserve(adj_cal.points.size());
    for (const auto& [h, y] : adj_cal.points)
      dev.push_back({h, tbp::pop2_calibration_deviation(h)});
    report["deviation"] = tbp::deviation_report_json(adjusted.h.cb, naive.h.cb,
                                                     naive.h.cb - adjusted.h.cb, dev);

    Json files;
    files["calibration_csv"] = write_curve_file(dir, "pop2_calibration.csv", adj_cal);
    files["rcc_csv"] = write_curve_file(dir, "pop2_rcc.csv", tbp::pop2_rcc(true));
    files["naive_calibration_csv"] =
        write_curve_file(dir, "pop2_naive_calibration.csv", nai_cal);
    files["naive_rcc_csv"] = write_curve_file(dir, "pop2_naive_rcc.csv", tbp::pop2_rcc(false));
    report["files"] = std::move(files);
  } else if (args.pop == "pop1") {
    if (args.spec_path.empty())
      throw tbp::ValidationError("--spec is required with --pop pop1");
    tbp::Pop1Spec spec = tbp::pop1_spec_from_json(read_json_file(args.spec_path));
    if (args.beta1_set) spec.beta[1] = args.beta1;
    const auto validated = tbp::validate_pop1_spec(spec);
    const auto table = tbp::pop1_joint_table(validated);
    const auto predictor = tbp::make_pop1_tbp(parse_tbp(args.tbp), table);
    const auto eval = tbp::evaluate_pop1_exact(table, predictor);

    report["population"] = "pop1";
    report["tbp"] = args.tbp;
    report["n"] = 0;
    report["method"] = "exact";
    report["adjusted"] = tbp::metric_report_json(eval.adjusted);
    report["naive"] = tbp::metric_report_json(eval.naive);
    report["deviation"] = tbp::deviation_report_json(eval.adjusted.cb, eval.naive.cb,
                                                     eval.cb_dev, eval.calib_dev);

    const std::string stem = "pop1_" + args.tbp + "_";
    Json files;
    files["calibration_csv"] =
        write_curve_file(dir, stem + "calibration.csv", eval.adjusted_calibration);
    files["rcc_csv"] = eval.adjusted_rcc
                           ? Json(write_curve_file(dir, stem + "rcc.csv", *eval.adjusted_rcc))
                           : Json(nullptr);
    files["naive_calibration_csv"] =
        write_curve_file(dir, stem + "naive_calibration.csv", eval.naive_calibration);
    files["naive_rcc_csv"] =
        eval.naive_rcc
            ? Json(write_curve_file(dir, stem + "naive_rcc.csv", *eval.naive_rcc))
            : Json(nullptr);
    report["files"] = std::move(files);
  } else {
    throw tbp::ValidationError("--pop must be pop1 or pop2");
  }

  emit_report(report, args.out_path);
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string data_path;
  std::string method = "or";
  std::string tbp_col;
  std::string tbp;
  std::string spec_path;
  std::string tau_col = "tau_hat";
  double clip = 0.01;
  int bins = 10;
  bool by_level = false;
  std::string out_path;
  std::string out_dir = ".";
  std::string tau_out_path;
};

const std::vector<double>& named_column(const tbp::Sample& sample, const std::string& name) {
  if (name == "h" && !sample.h.empty()) return sample.h;
  if (name == "y") return sample.y;
  if (name == "y0" && !sample.y0.empty()) return sample.y0;
  if (name == "y1" && !sample.y1.empty()) return sample.y1;
  for (const auto& [extra_name, col] : sample.extras)
    if (extra_name == name) return col;
  throw tbp::ValidationError("missing column '" + name + "'");
}

std::vector<double> resolve_predictions(const tbp::Sample& sample, const EvaluateArgs& args) {
  if (!args.tbp_col.empty()) return named_column(sample, args.tbp_col);
  if (!args.tbp.empty()) {
    if (args.spec_path.empty())
      throw tbp::ValidationError("--tbp requires --spec with the population file");
    if (sample.x_cols.size() != 2)
      throw tbp::ValidationError("--tbp needs exactly two x columns");
    const auto spec =
        tbp::validate_pop1_spec(tbp::pop1_spec_from_json(read_json_file(args.spec_path)));
    const auto predictor = tbp::make_pop1_tbp(parse_tbp(args.tbp), tbp::pop1_joint_table(spec));
    std::vector<double> h(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double x1 = sample.x_cols[0][i];
      const double x2 = sample.x_cols[1][i];
      if ((x1 != 0.0 && x1 != 1.0) || (x2 != 0.0 && x2 != 1.0))
        throw tbp::ValidationError("--tbp requires binary x columns");
      h[i] = predictor.predict(static_cast<int>(x1), static_cast<int>(x2));
    }
    return h;
  }
  if (!sample.h.empty()) return sample.h;
  throw tbp::ValidationError("no prediction source: pass --tbp-col or --tbp with --spec");
}

tbp::Binning choose_binning(std::span<const double> h, int bins, bool by_level) {
  if (by_level) return tbp::Binning::by_level();
  std::vector<double> distinct(h.begin(), h.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= static_cast<std::size_t>(bins)) return tbp::Binning::by_level();
  return tbp::Binning::equal_frequency(bins);
}

int cmd_evaluate(const EvaluateArgs& args) {
  std::ifstream is(args.data_path, std::ios::binary);
  if (!is) throw IoFailure("cannot open file: " + args.data_path);
  const tbp::Sample sample = tbp::read_sample_csv(is);
  if (sample.size() == 0) throw tbp::ValidationError("data file has no records");

  const std::vector<double> h = resolve_predictions(sample, args);

  tbp::TauEstimate tau;
  if (args.method == "or") {
    tau = tbp::outcome_regression_tau(sample, true);
  } else if (args.method == "ipw") {
    const auto propensity = tbp::estimate_propensity(sample, args.clip, true);
    tau = tbp::ipw_tau(sample, propensity, args.clip);
  } else if (args.method == "provided") {
    tau = tbp::provided_tau(named_column(sample, args.tau_col));
  } else {
    throw tbp::ValidationError("--method must be or, ipw, or provided");
  }

  tbp::MetricReport adjusted = tbp::cb_plug_in(tau.tau_hat, h);
  adjusted.flags.insert(adjusted.flags.end(), tau.flags.begin(), tau.flags.end());

  const tbp::Binning binning = choose_binning(h, args.bins, args.by_level);
  const auto calibration = tbp::calibration_curve(tau.tau_hat, h, binning);
  const auto rcc_curve = tbp::rcc(tau.tau_hat, h);

  // Unadjusted companion: the same pipeline on the per-X treated/untreated
  // contrast, available only when every occupied X cell has both arms.
  std::optional<tbp::MetricReport> naive;
  std::optional<tbp::CurvePoints> naive_calibration;
  std::optional<tbp::CurvePoints> naive_rcc;
  try {
    const auto naive_tau = tbp::outcome_regression_tau(sample, false);
    naive = tbp::cb_plug_in(naive_tau.tau_hat, h);
    naive_calibration = tbp::calibration_curve(naive_tau.tau_hat, h, binning);
    naive_rcc = tbp::rcc(naive_tau.tau_hat, h);
  } catch (const tbp::SingleArmCellError&) {
    adjusted.flags.push_back("naive contrast unavailable: single-arm X cell");
  } catch (const tbp::CbUndefinedError&) {
    adjusted.flags.push_back("naive contrast unavailable: C_b undefined");
  } catch (const std::domain_error&) {
    adjusted.flags.push_back("naive contrast unavailable: RCC undefined");
  }

  if (!args.tau_out_path.empty()) {
    tbp::Sample augmented = sample;
    std::erase_if(augmented.extras, [](const auto& kv) { return kv.first == "tau_hat"; });
    augmented.extras.emplace_back("tau_hat", tau.tau_hat);
    auto os = open_output(args.tau_out_path);
    tbp::write_sample_csv(augmented, os);
    if (!os) throw IoFailure("failed writing " + args.tau_out_path);
  }

  Json report;
  report["population"] = "data";
  report["tbp"] = !args.tbp.empty() ? args.tbp : (!args.tbp_col.empty() ? args.tbp_col : "h");
  report["n"] = sample.size();
  report["method"] = args.method;
  Json diagnostics;
  diagnostics["cells_used"] = tau.cells_used;
  diagnostics["clip_count"] = tau.clip_count;
  report["diagnostics"] = std::move(diagnostics);
  report["adjusted"] = tbp::metric_report_json(adjusted);
  report["naive"] = naive ? tbp::metric_report_json(*naive) : Json(nullptr);
  if (naive) {
    std::vector<tbp::DeviationPoint> dev;
    if (naive_calibration->points.size() == calibration.points.size())
      for (std::size_t i = 0; i < calibration.points.size(); ++i)
        dev.push_back({calibration.points[i].first,
                       naive_calibration->points[i].second - calibration.points[i].second});
    report["deviation"] =
        tbp::deviation_report_json(adjusted.cb, naive->cb, naive->cb - adjusted.cb, dev);
  } else {
    report["deviation"] = nullptr;
  }

  const fs::path dir(args.out_dir);
  Json files;
  files["calibration_csv"] = write_curve_file(dir, "evaluate_calibration.csv", calibration);
  files["rcc_csv"] = write_curve_file(dir, "evaluate_rcc.csv", rcc_curve);
  if (naive) {
    files["naive_calibration_csv"] =
        write_curve_file(dir, "evaluate_naive_calibration.csv", *naive_calibration);
    files["naive_rcc_csv"] = write_curve_file(dir, "evaluate_naive_rcc.csv", *naive_rcc);
  }
  report["files"] = std::move(files);

  emit_report(report, args.out_path);
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string spec_path;
  int beta1_steps = 200;
  int alpha13_steps = 200;
  std::string out_path;
};

int cmd_sweep(const SweepArgs& args) {
  const tbp::Pop1Spec spec = tbp::pop1_spec_from_json(read_json_file(args.spec_path));
  const auto beta1_grid = tbp::default_beta1_grid(spec, args.beta1_steps);
  const auto alpha13_grid = tbp::default_alpha13_grid(spec, args.alpha13_steps);
  const tbp::SweepTable table = tbp::sweep_bias(spec, beta1_grid, alpha13_grid);

  std::size_t valid = 0;
  for (const auto& row : table.rows) valid += row.valid ? 1 : 0;
  if (valid == 0) throw tbp::ValidationError("all sweep grid points are invalid");

  auto os = open_output(args.out_path);
  tbp::write_sweep_csv(table, os);
  if (!os) throw IoFailure("failed writing " + args.out_path);
  std::cerr << "sweep " << beta1_grid.size() << "x" << alpha13_grid.size() << " grid, "
            << valid << "/" << table.rows.size() << " valid points -> " << args.out_path
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment benefit predictor evaluation under confounding"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a population config");
  simulate->add_option("--pop", sim.pop_path, "Population JSON file")->required();
  simulate->add_option("--n", sim.n, "Number of records")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out", sim.out_path, "Output sample CSV")->required();
  simulate->add_flag("--retain-counterfactuals", sim.retain_counterfactuals,
                     "Also write the y0,y1 columns");
  simulate->add_option("--tbp", sim.tbp, "Also write the h column for this predictor (pop1)");

  OracleArgs ora;
  auto* oracle = app.add_subcommand("oracle", "Exact population-level metrics");
  oracle->add_option("--pop", ora.pop, "pop1 or pop2")->required();
  oracle->add_option("--spec", ora.spec_path, "Population JSON file (pop1)");
  oracle->add_option("--tbp", ora.tbp, "Predictor: h1, h2, or h3 (pop1)");
  oracle->add_option("--beta1", ora.beta1, "Override the confounding coefficient beta1")
      ->each([&ora](const std::string&) { ora.beta1_set = true; });
  oracle->add_option("--out", ora.out_path, "Report JSON path (default: stdout)");
  oracle->add_option("--out-dir", ora.out_dir, "Directory for curve CSVs");

  EvaluateArgs eva;
  auto* evaluate = app.add_subcommand("evaluate", "Plug-in evaluation of a sample CSV");
  evaluate->add_option("--data", eva.data_path, "Sample CSV")->required();
  evaluate->add_option("--method", eva.method, "or, ipw, or provided");
  evaluate->add_option("--tbp-col", eva.tbp_col, "Column holding the predictions");
  evaluate->add_option("--tbp", eva.tbp, "Predictor h1/h2/h3 computed from x (needs --spec)");
  evaluate->add_option("--spec", eva.spec_path, "Population JSON file for --tbp");
  evaluate->add_option("--tau-col", eva.tau_col, "Benefit column for --method provided");
  evaluate->add_option("--clip", eva.clip, "Propensity clip epsilon (ipw)");
  evaluate->add_option("--bins", eva.bins, "Equal-frequency bins for continuous predictions");
  evaluate->add_flag("--by-level", eva.by_level, "Force one calibration point per level");
  evaluate->add_option("--tau-out", eva.tau_out_path,
                       "Write the input CSV with an added tau_hat column");
  evaluate->add_option("--out", eva.out_path, "Report JSON path (default: stdout)");
  evaluate->add_option("--out-dir", eva.out_dir, "Directory for curve CSVs");

  SweepArgs swe;
  auto* sweep = app.add_subcommand("sweep", "Bias magnitude over a confounding grid");
  sweep->add_option("--spec", swe.spec_path, "Base population JSON file")->required();
  sweep->add_option("--beta1-steps", swe.beta1_steps, "Grid steps for beta1");
  sweep->add_option("--alpha13-steps", swe.alpha13_steps, "Grid steps for alpha13");
  sweep->add_option("--out", swe.out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (oracle->parsed()) return cmd_oracle(ora);
    if (evaluate->parsed()) return cmd_evaluate(eva);
    return cmd_sweep(swe);
  } catch (const tbp::SingleArmCellError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEstimation;
  } catch (const tbp::CbUndefinedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEstimation;
  } catch (const tbp::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const tbp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return 1;
  }
}
