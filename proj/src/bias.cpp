#include "tbp/bias.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tbp/errors.hpp"
#include "tbp/threads.hpp"

namespace tbp {

BiasTable pop1_bias(const JointTable& table) {
  BiasTable out;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      const std::size_t xi = JointTable::x_index(x1, x2);
      if (table.p_x[xi] <= 0.0) continue;  // unoccupied x: bias carries no weight
      const double pz1 = table.p_z1_given_x[xi];
      const JointCell& c0 = table.cell(x1, x2, 0);
      const JointCell& c1 = table.cell(x1, x2, 1);

      double diff = 0.0;
      for (int arm : {0, 1}) {
        const double w0 = (arm ? c0.e : 1.0 - c0.e) * (1.0 - pz1);
        const double w1 = (arm ? c1.e : 1.0 - c1.e) * pz1;
        const double pa = w0 + w1;
        if (pa <= 0.0) {
          std::ostringstream os;
          os << "conditional undefined: P(A=" << arm << " | x1=" << x1 << ", x2=" << x2
             << ") = 0";
          throw OverlapError(os.str());
        }
        const double mean = ((arm ? c0.mu1 : c0.mu0) * w0 + (arm ? c1.mu1 : c1.mu0) * w1) / pa;
        diff += arm ? mean : -mean;
      }
      out.naive_diff[xi] = diff;
      out.bias[xi] = diff - table.tau_s[xi];
    }
  return out;
}

namespace {

struct Pop1Level {
  double h = 0;
  double mass = 0;
  double mean_adjusted = 0;  // E[tau(X,Z) | H = h]
  double mean_naive = 0;     // E[D(X) | H = h]
  double mean_bias = 0;      // E[bias(X) | H = h]
};

std::vector<Pop1Level> pop1_levels(const JointTable& table, const Pop1Tbp& tbp,
                                   const BiasTable& bias) {
  std::map<double, Pop1Level> levels;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      const std::size_t xi = JointTable::x_index(x1, x2);
      const double mass = table.p_x[xi];
      if (mass <= 0.0) continue;
      const double h = tbp.predict(x1, x2);
      Pop1Level& lv = levels[h];
      lv.h = h;
      lv.mass += mass;
      lv.mean_adjusted += table.tau_s[xi] * mass;
      lv.mean_naive += bias.naive_diff[xi] * mass;
      lv.mean_bias += bias.bias[xi] * mass;
    }
  std::vector<Pop1Level> out;
  out.reserve(levels.size());
  for (auto& [h, lv] : levels) {
    lv.mean_adjusted /= lv.mass;
    lv.mean_naive /= lv.mass;
    lv.mean_bias /= lv.mass;
    out.push_back(lv);
  }
  return out;
}

GroupedBenefit to_grouped(const std::vector<Pop1Level>& levels, bool adjusted) {
  std::vector<BenefitGroup> groups;
  groups.reserve(levels.size());
  for (const auto& lv : levels)
    groups.push_back({lv.h, lv.mass, adjusted ? lv.mean_adjusted : lv.mean_naive});
  return GroupedBenefit::from_groups(std::move(groups));
}

}  // namespace

std::vector<DeviationPoint> pop1_calibration_deviation(const BiasTable& bias,
                                                       const Pop1Tbp& tbp,
                                                       const JointTable& table) {
  std::vector<DeviationPoint> out;
  for (const auto& lv : pop1_levels(table, tbp, bias))
    out.push_back({lv.h, lv.mean_bias});
  return out;
}

double cb_deviation(double tau_star, double e_bias, double e_bias_eta, double e_b_eta) {
  const double denom = e_b_eta * (e_b_eta + e_bias_eta);
  if (denom == 0.0) {
    std::ostringstream os;
    os << "deviation denominator is 0 (E[B eta(H)] = " << e_b_eta
       << ", E[B eta(H)] + E[bias eta(H)] = " << e_b_eta + e_bias_eta << ")";
    throw std::domain_error(os.str());
  }
  return (tau_star * e_bias_eta - e_b_eta * e_bias) / denom;
}

Pop1Evaluation evaluate_pop1_exact(const JointTable& table, const Pop1Tbp& tbp) {
  const BiasTable bias = pop1_bias(table);
  const auto levels = pop1_levels(table, tbp, bias);

  Pop1Evaluation eval;
  const GroupedBenefit adjusted = to_grouped(levels, true);
  const GroupedBenefit naive = to_grouped(levels, false);
  eval.adjusted = cb_exact(adjusted);
  eval.naive = cb_exact(naive);
  if (eval.adjusted.tau_star > 0.0) eval.adjusted_rcc = rcc_from_groups(adjusted);
  if (eval.naive.tau_star > 0.0) eval.naive_rcc = rcc_from_groups(naive);

  eval.adjusted_calibration.kind = CurveKind::calibration;
  eval.naive_calibration.kind = CurveKind::calibration;
  for (const auto& lv : levels) {
    eval.adjusted_calibration.points.emplace_back(lv.h, lv.mean_adjusted);
    eval.naive_calibration.points.emplace_back(lv.h, lv.mean_naive);
    eval.calib_dev.push_back({lv.h, lv.mean_bias});
  }

  eval.cb_dev = eval.naive.cb - eval.adjusted.cb;

  double e_bias = 0.0, e_bias_eta = 0.0;
  double cum = 0.0;
  for (const auto& lv : levels) {
    cum += lv.mass;
    const double eta = 2.0 * cum - lv.mass;
    e_bias += lv.mass * lv.mean_bias;
    e_bias_eta += lv.mass * lv.mean_bias * eta;
  }
  eval.cb_dev_factored =
      cb_deviation(eval.adjusted.tau_star, e_bias, e_bias_eta, eval.adjusted.maxlike);
  return eval;
}

namespace {

SweepRow sweep_point(const Pop1Spec& base, double beta1, double alpha13) {
  Pop1Spec spec = base;
  spec.beta[1] = beta1;
  spec.alpha1[3] = alpha13;

  SweepRow row;
  row.beta1 = beta1;
  row.a13_minus_a03 = alpha13 - spec.alpha0[3];
  try {
    const ValidatedPop1Spec validated = validate_pop1_spec(spec);
    const JointTable table = pop1_joint_table(validated);
    const BiasTable bias = pop1_bias(table);
    row.abs_bias = {std::abs(bias.bias[JointTable::x_index(1, 1)]),
                    std::abs(bias.bias[JointTable::x_index(1, 0)]),
                    std::abs(bias.bias[JointTable::x_index(0, 1)]),
                    std::abs(bias.bias[JointTable::x_index(0, 0)])};
    const double worst = *std::max_element(row.abs_bias.begin(), row.abs_bias.end());
    if (worst > 0.1)
      row.region = ">0.1";
    else if (worst > 0.05)
      row.region = ">0.05";
    else if (worst > 0.01)
      row.region = ">0.01";
    else
      row.region = "<=0.01";
    row.valid = true;
  } catch (const ValidationError&) {
    row.abs_bias = {std::nan(""), std::nan(""), std::nan(""), std::nan("")};
    row.region = "invalid";
    row.valid = false;
  }
  return row;
}

void check_grids(std::span<const double> beta1_grid, std::span<const double> alpha13_grid) {
  if (beta1_grid.empty() || alpha13_grid.empty()) throw ValidationError("empty sweep grid");
}

}  // namespace

SweepTable sweep_bias(const Pop1Spec& base, std::span<const double> beta1_grid,
                      std::span<const double> alpha13_grid) {
  check_grids(beta1_grid, alpha13_grid);
  SweepTable table;
  table.rows.resize(beta1_grid.size() * alpha13_grid.size());
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(table.rows.size());
  const std::size_t inner = alpha13_grid.size();
  [[maybe_unused]] const int workers = max_workers();
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) / inner;
    const std::size_t j = static_cast<std::size_t>(k) % inner;
    table.rows[static_cast<std::size_t>(k)] = sweep_point(base, beta1_grid[i], alpha13_grid[j]);
  }
  return table;
}

SweepTable sweep_bias_serial(const Pop1Spec& base, std::span<const double> beta1_grid,
                             std::span<const double> alpha13_grid) {
  check_grids(beta1_grid, alpha13_grid);
  SweepTable table;
  table.rows.reserve(beta1_grid.size() * alpha13_grid.size());
  for (double beta1 : beta1_grid)
    for (double alpha13 : alpha13_grid)
      table.rows.push_back(sweep_point(base, beta1, alpha13));
  return table;
}

std::pair<double, double> pop1_alpha13_interval(const Pop1Spec& base) {
  double min_base = 2.0, max_base = -1.0;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      const double value = base.alpha1[0] + base.alpha1[1] * x1 + base.alpha1[2] * x2;
      min_base = std::min(min_base, value);
      max_base = std::max(max_base, value);
    }
  return {-min_base, 1.0 - max_base};
}

namespace {

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw ValidationError("grid needs at least 1 step");
  std::vector<double> grid(static_cast<std::size_t>(steps));
  if (steps == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (hi - lo) / static_cast<double>(steps - 1);
  for (int i = 0; i < steps; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
  grid.back() = hi;
  return grid;
}

}  // namespace

std::vector<double> default_beta1_grid(const Pop1Spec& base, int steps) {
  const double hi = (1.0 - base.beta[0]) - 1e-6;
  if (!(hi > 0.0)) throw ValidationError("no valid beta1 range: beta0 >= 1");
  return linspace(0.0, hi, steps);
}

std::vector<double> default_alpha13_grid(const Pop1Spec& base, int steps) {
  const auto [lo, hi] = pop1_alpha13_interval(base);
  if (!(hi >= lo)) throw ValidationError("no valid alpha13 range for this spec");
  return linspace(lo, hi, steps);
}

}  // namespace tbp
