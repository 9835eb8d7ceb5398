// Timing harness for the parallel kernels against their serial references.
// Each pair must produce identical output; the table reports the speedup.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tbp/bias.hpp"
#include "tbp/io.hpp"
#include "tbp/metrics.hpp"
#include "tbp/pop1.hpp"
#include "tbp/simulate.hpp"
#include "tbp/threads.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Row {
  std::string kernel;
  double serial_s = 0;
  double parallel_s = 0;
  bool identical = false;
};

void print_rows(const std::vector<Row>& rows) {
  std::printf("%-28s %12s %12s %9s %10s\n", "kernel", "serial [s]", "parallel [s]", "speedup",
              "identical");
  for (const auto& row : rows) {
    std::printf("%-28s %12.3f %12.3f %8.2fx %10s\n", row.kernel.c_str(), row.serial_s,
                row.parallel_s, row.serial_s / row.parallel_s,
                row.identical ? "yes" : "NO");
  }
}

tbp::ValidatedPop1Spec load_spec() {
  std::ifstream is(std::string(TBP_ASSETS_DIR) + "/pop1.json");
  return tbp::validate_pop1_spec(tbp::pop1_spec_from_json(tbp::Json::parse(is)));
}

}  // namespace

int main() {
  std::printf("workers: %d\n\n", tbp::max_workers());
  std::vector<Row> rows;
  const auto spec = load_spec();

  {
    Row row{"simulate pop1 (n=4e6)", 0, 0, false};
    tbp::SimulateOptions options{4000000, 42, true, tbp::Pop1TbpKind::h3};
    auto t0 = Clock::now();
    const auto serial = tbp::simulate_serial(spec, options);
    row.serial_s = seconds(t0);
    t0 = Clock::now();
    const auto parallel = tbp::simulate(spec, options);
    row.parallel_s = seconds(t0);
    row.identical = serial.y == parallel.y && serial.a == parallel.a &&
                    serial.x_cols == parallel.x_cols && serial.h == parallel.h;
    rows.push_back(row);
  }

  {
    Row row{"simulate pop2 (n=4e6)", 0, 0, false};
    tbp::SimulateOptions options{4000000, 43, true, {}};
    auto t0 = Clock::now();
    const auto serial = tbp::simulate_serial(tbp::Pop2Spec{}, options);
    row.serial_s = seconds(t0);
    t0 = Clock::now();
    const auto parallel = tbp::simulate(tbp::Pop2Spec{}, options);
    row.parallel_s = seconds(t0);
    row.identical = serial.y == parallel.y && serial.h == parallel.h &&
                    serial.y0 == parallel.y0 && serial.y1 == parallel.y1;
    rows.push_back(row);
  }

  {
    Row row{"pairwise oracle (n=20000)", 0, 0, false};
    const auto sample = tbp::simulate(tbp::Pop2Spec{}, {20000, 44, false, {}});
    std::vector<double> b(sample.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      b[i] = std::max(sample.x_cols[0][i], sample.x_cols[1][i]);
    auto t0 = Clock::now();
    const double serial = tbp::pairwise_maxlike_oracle_serial(b, sample.h);
    row.serial_s = seconds(t0);
    t0 = Clock::now();
    const double parallel = tbp::pairwise_maxlike_oracle(b, sample.h);
    row.parallel_s = seconds(t0);
    row.identical = serial == parallel;
    rows.push_back(row);
  }

  {
    Row row{"bias sweep (300x300)", 0, 0, false};
    const auto beta1 = tbp::default_beta1_grid(spec.get(), 300);
    const auto alpha13 = tbp::default_alpha13_grid(spec.get(), 300);
    auto t0 = Clock::now();
    const auto serial = tbp::sweep_bias_serial(spec.get(), beta1, alpha13);
    row.serial_s = seconds(t0);
    t0 = Clock::now();
    const auto parallel = tbp::sweep_bias(spec.get(), beta1, alpha13);
    row.parallel_s = seconds(t0);
    row.identical = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; row.identical && i < serial.rows.size(); ++i)
      row.identical = serial.rows[i].region == parallel.rows[i].region &&
                      serial.rows[i].beta1 == parallel.rows[i].beta1;
    rows.push_back(row);
  }

  print_rows(rows);
  for (const auto& row : rows)
    if (!row.identical) return 1;
  return 0;
}
