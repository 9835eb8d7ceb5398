#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tbp/io.hpp"
#include "tbp/simulate.hpp"

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tbpeval_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd =
      std::string(TBP_CLI_PATH) + " " + args + " 2>" + (work_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void dump(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

tbp::Json report_at(const fs::path& path) { return tbp::Json::parse(slurp(path)); }

}  // namespace

TEST_CASE("simulate is deterministic and validates n") {
  const auto pop2 = tbp_test::asset_path("pop2.json");
  const auto out = work_dir() / "s.csv";
  const std::string flags =
      "simulate --pop " + pop2 + " --n 1000 --seed 7 --out " + out.string();
  REQUIRE(run(flags) == 0);
  const std::string first = slurp(out);
  CHECK(std::count(first.begin(), first.end(), '\n') == 1001);

  REQUIRE(run(flags) == 0);
  CHECK(slurp(out) == first);

  // worker count must not leak into the bytes
  setenv("TBP_EVAL_THREADS", "1", 1);
  REQUIRE(run(flags) == 0);
  unsetenv("TBP_EVAL_THREADS");
  CHECK(slurp(out) == first);

  CHECK(run("simulate --pop " + pop2 + " --n 0 --seed 7 --out " + out.string()) == 2);
  CHECK(run("simulate --pop " + (work_dir() / "nope.json").string() + " --n 10 --seed 7 --out " +
            out.string()) == 3);
}

TEST_CASE("oracle reports for the continuous population") {
  const auto out = work_dir() / "pop2.json";
  REQUIRE(run("oracle --pop pop2 --out " + out.string() + " --out-dir " +
              (work_dir() / "curves").string()) == 0);
  const tbp::Json report = report_at(out);
  CHECK(report["population"] == "pop2");
  CHECK(std::abs(report["adjusted"]["cb"].get<double>() - 0.1489362) < 1e-6);
  CHECK(std::abs(report["naive"]["cb"].get<double>() - 0.07732865) < 1e-6);
  CHECK(std::abs(report["adjusted_tau_s"]["cb"].get<double>() - 1.0 / 6.0) < 1e-9);
  CHECK(fs::exists(work_dir() / "curves" / "pop2_calibration.csv"));
  CHECK(fs::exists(work_dir() / "curves" / "pop2_rcc.csv"));
}

TEST_CASE("oracle reports for the binary population") {
  const auto spec = tbp_test::asset_path("pop1.json");
  const auto out = work_dir() / "pop1.json";
  const auto curves = (work_dir() / "curves").string();

  // without confounding the naive metrics collapse onto the adjusted ones
  REQUIRE(run("oracle --pop pop1 --spec " + spec + " --tbp h3 --beta1 0 --out " + out.string() +
              " --out-dir " + curves) == 0);
  const tbp::Json unconfounded = report_at(out);
  CHECK(std::abs(unconfounded["adjusted"]["cb"].get<double>() -
                 unconfounded["naive"]["cb"].get<double>()) < 1e-12);
  CHECK(std::abs(unconfounded["deviation"]["cb_deviation"].get<double>()) < 1e-12);

  // the two three-level predictors rank patients identically
  REQUIRE(run("oracle --pop pop1 --spec " + spec + " --tbp h1 --out " + out.string() +
              " --out-dir " + curves) == 0);
  const double cb_h1 = report_at(out)["adjusted"]["cb"].get<double>();
  REQUIRE(run("oracle --pop pop1 --spec " + spec + " --tbp h2 --out " + out.string() +
              " --out-dir " + curves) == 0);
  const double cb_h2 = report_at(out)["adjusted"]["cb"].get<double>();
  CHECK(cb_h1 == doctest::Approx(cb_h2).epsilon(1e-13));

  CHECK(run("oracle --pop pop1 --tbp h1 --out " + out.string()) == 2);  // --spec missing
  CHECK(run("oracle --pop pop3 --out " + out.string()) == 2);
}

TEST_CASE("evaluate consumes simulate output directly") {
  const auto spec = tbp_test::asset_path("pop1.json");
  const auto data = work_dir() / "pop1_sample.csv";
  const auto out = work_dir() / "report.json";
  const auto curves = (work_dir() / "curves").string();

  REQUIRE(run("simulate --pop " + spec + " --n 20000 --seed 42 --tbp h1 --out " +
              data.string()) == 0);
  REQUIRE(run("evaluate --data " + data.string() + " --method or --tbp-col h --out " +
              out.string() + " --out-dir " + curves) == 0);
  const tbp::Json report = report_at(out);
  CHECK(report["n"] == 20000);
  CHECK(report["method"] == "or");
  CHECK(report["adjusted"]["cb"].is_number());
  CHECK(report["naive"]["cb"].is_number());
  CHECK(std::abs(report["deviation"]["cb_deviation"].get<double>() -
                 (report["naive"]["cb"].get<double>() - report["adjusted"]["cb"].get<double>())) <
        1e-12);
  CHECK(fs::exists(work_dir() / "curves" / "evaluate_calibration.csv"));

  // ipw on the same file
  REQUIRE(run("evaluate --data " + data.string() + " --method ipw --clip 0.01 --tbp-col h --out " +
              out.string() + " --out-dir " + curves) == 0);
  CHECK(report_at(out)["method"] == "ipw");

  // predictor computed from the x columns instead of a stored column
  REQUIRE(run("evaluate --data " + data.string() + " --method or --tbp h3 --spec " + spec +
              " --out " + out.string() + " --out-dir " + curves) == 0);
  CHECK(report_at(out)["tbp"] == "h3");

  CHECK(run("evaluate --data " + data.string() + " --method or --tbp-col nope --out " +
            out.string()) == 2);
  CHECK(run("evaluate --data " + data.string() + " --method banana --tbp-col h --out " +
            out.string()) == 2);
}

TEST_CASE("evaluate with a provided benefit column") {
  const auto data = work_dir() / "pop2_sample.csv";
  const auto out = work_dir() / "provided.json";
  const auto tau_out = work_dir() / "augmented.csv";

  tbp::Sample sample = tbp::simulate(tbp::Pop2Spec{}, {5000, 77, false, {}});
  std::vector<double> tau(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    tau[i] = std::max(sample.x_cols[0][i], sample.x_cols[1][i]);
  sample.extras.emplace_back("tau_hat", tau);
  {
    std::ofstream os(data, std::ios::binary);
    tbp::write_sample_csv(sample, os);
  }

  REQUIRE(run("evaluate --data " + data.string() +
              " --method provided --tau-col tau_hat --tbp-col h --tau-out " +
              tau_out.string() + " --out " + out.string() + " --out-dir " +
              (work_dir() / "curves").string()) == 0);
  const tbp::Json report = report_at(out);
  CHECK(std::abs(report["adjusted"]["cb"].get<double>() - 0.1489) < 0.05);
  CHECK(report["naive"].is_null());  // continuous x: no saturated contrast
  CHECK(report["diagnostics"]["cells_used"] == 0);

  // the augmented CSV round-trips with the benefit column in place
  std::ifstream is(tau_out, std::ios::binary);
  const tbp::Sample augmented = tbp::read_sample_csv(is);
  REQUIRE(augmented.extras.size() == 1);
  CHECK(augmented.extras[0].first == "tau_hat");
  CHECK(augmented.extras[0].second == tau);

  // ipw accepts the same file unchanged (continuous cells, record-level phi)
  REQUIRE(run("evaluate --data " + data.string() + " --method ipw --clip 0.01 --tbp-col h" +
              " --out " + out.string() + " --out-dir " + (work_dir() / "curves").string()) == 0);
  CHECK(report_at(out)["method"] == "ipw");
}

TEST_CASE("evaluate failure modes") {
  const auto out = work_dir() / "r.json";

  const auto malformed = work_dir() / "malformed.csv";
  dump(malformed, "y,a,x1,z1,h\n1,1,0,0,0.5\n1,x,0,0,0.5\n");
  CHECK(run("evaluate --data " + malformed.string() + " --method or --tbp-col h --out " +
            out.string()) == 2);

  const auto single_arm = work_dir() / "single_arm.csv";
  dump(single_arm,
       "y,a,x1,z1,h\n1,1,0,0,0.1\n0,1,0,0,0.1\n1,0,1,0,0.9\n0,0,1,0,0.9\n");
  CHECK(run("evaluate --data " + single_arm.string() + " --method or --tbp-col h --out " +
            out.string()) == 4);
}

TEST_CASE("sweep emits the grid") {
  const auto spec = tbp_test::asset_path("pop1.json");
  const auto out = work_dir() / "sweep.csv";
  REQUIRE(run("sweep --spec " + spec + " --beta1-steps 1 --alpha13-steps 1 --out " +
              out.string()) == 0);
  const std::string single = slurp(out);
  CHECK(std::count(single.begin(), single.end(), '\n') == 2);

  REQUIRE(run("sweep --spec " + spec + " --beta1-steps 5 --alpha13-steps 4 --out " +
              out.string()) == 0);
  std::istringstream rows(slurp(out));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "beta1,a13_minus_a03,bias_11,bias_10,bias_01,bias_00,region");
  std::size_t count = 0, zero_rows = 0;
  while (std::getline(rows, line)) {
    ++count;
    if (line.rfind("0,", 0) == 0) {
      ++zero_rows;
      CHECK(line.substr(line.rfind(',') + 1) == "<=0.01");
    }
  }
  CHECK(count == 20);
  CHECK(zero_rows == 4);
}
