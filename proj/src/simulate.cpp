#include "tbp/simulate.hpp"

#include <array>
#include <cstddef>

#include "tbp/errors.hpp"
#include "tbp/rng.hpp"
#include "tbp/threads.hpp"

namespace tbp {

namespace {

Sample allocate_sample(const SimulateOptions& options, std::size_t d, std::size_t p,
                       bool with_h) {
  if (options.n < 1) throw ValidationError("n must be >= 1");
  Sample sample;
  sample.provenance = Sample::Provenance::simulated;
  sample.seed = options.seed;
  sample.y.resize(options.n);
  sample.a.resize(options.n);
  sample.x_cols.assign(d, std::vector<double>(options.n));
  sample.z_cols.assign(p, std::vector<double>(options.n));
  if (options.retain_counterfactuals) {
    sample.y0.resize(options.n);
    sample.y1.resize(options.n);
  }
  if (with_h) sample.h.resize(options.n);
  return sample;
}

struct Pop1Draw {
  const Pop1Spec* spec;
  std::array<double, 8> cum;  // cumulative covariate masses in cell order
  const Pop1Tbp* tbp;

  void record(Sample& sample, std::uint64_t seed, std::size_t i) const {
    Rng rng(seed, i);
    const double u = rng.next_double();
    std::size_t cell = 0;
    while (cell + 1 < cum.size() && u >= cum[cell]) ++cell;
    const int x1 = static_cast<int>(cell >> 2) & 1;
    const int x2 = static_cast<int>(cell >> 1) & 1;
    const int z = static_cast<int>(cell) & 1;

    const bool a = rng.next_bernoulli(spec->propensity(z));
    const double y0 = rng.next_bernoulli(spec->mu(0, x1, x2, z)) ? 1.0 : 0.0;
    const double y1 = rng.next_bernoulli(spec->mu(1, x1, x2, z)) ? 1.0 : 0.0;

    sample.x_cols[0][i] = x1;
    sample.x_cols[1][i] = x2;
    sample.z_cols[0][i] = z;
    sample.a[i] = a ? 1 : 0;
    sample.y[i] = a ? y1 : y0;
    if (!sample.y0.empty()) {
      sample.y0[i] = y0;
      sample.y1[i] = y1;
    }
    if (!sample.h.empty()) sample.h[i] = tbp->predict(x1, x2);
  }
};

struct Pop2Draw {
  double sigma;

  void record(Sample& sample, std::uint64_t seed, std::size_t i) const {
    Rng rng(seed, i);
    const double x1 = rng.next_double();
    const double x2 = rng.next_double();
    const double z = rng.next_open();  // keeps e(x,z) = z inside (0,1)
    const bool a = rng.next_bernoulli(z);
    const double tau_s = x1 > x2 ? x1 : x2;
    const double base = (z > x2 ? z : x2) + 0.1 * x1;
    const auto [n0, n1] = rng.next_normal_pair();
    const double y0 = -0.5 * tau_s + base + sigma * n0;
    const double y1 = 0.5 * tau_s + base + sigma * n1;

    sample.x_cols[0][i] = x1;
    sample.x_cols[1][i] = x2;
    sample.z_cols[0][i] = z;
    sample.a[i] = a ? 1 : 0;
    sample.y[i] = a ? y1 : y0;
    if (!sample.y0.empty()) {
      sample.y0[i] = y0;
      sample.y1[i] = y1;
    }
    sample.h[i] = x1 + x2;
  }
};

template <typename Draw>
void fill_parallel(Sample& sample, std::uint64_t seed, const Draw& draw) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sample.size());
  [[maybe_unused]] const int workers = max_workers();
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    draw.record(sample, seed, static_cast<std::size_t>(i));
}

template <typename Draw>
void fill_serial(Sample& sample, std::uint64_t seed, const Draw& draw) {
  for (std::size_t i = 0; i < sample.size(); ++i) draw.record(sample, seed, i);
}

Pop1Draw make_pop1_draw(const Pop1Spec& spec, const Pop1Tbp* tbp) {
  Pop1Draw draw{&spec, {}, tbp};
  double cum = 0.0;
  for (std::size_t cell = 0; cell < 8; ++cell) {
    cum += spec.p[cell];
    draw.cum[cell] = cum;
  }
  draw.cum[7] = 1.0;
  return draw;
}

}  // namespace

Sample simulate(const ValidatedPop1Spec& spec, const SimulateOptions& options) {
  Sample sample = allocate_sample(options, 2, 1, options.tbp.has_value());
  Pop1Tbp tbp;
  if (options.tbp) tbp = make_pop1_tbp(*options.tbp, pop1_joint_table(spec));
  const Pop1Draw draw = make_pop1_draw(spec.get(), &tbp);
  fill_parallel(sample, options.seed, draw);
  return sample;
}

Sample simulate_serial(const ValidatedPop1Spec& spec, const SimulateOptions& options) {
  Sample sample = allocate_sample(options, 2, 1, options.tbp.has_value());
  Pop1Tbp tbp;
  if (options.tbp) tbp = make_pop1_tbp(*options.tbp, pop1_joint_table(spec));
  const Pop1Draw draw = make_pop1_draw(spec.get(), &tbp);
  fill_serial(sample, options.seed, draw);
  return sample;
}

Sample simulate(const Pop2Spec& spec, const SimulateOptions& options) {
  if (!(spec.sigma > 0.0)) throw ValidationError("sigma must be > 0");
  Sample sample = allocate_sample(options, 2, 1, true);
  fill_parallel(sample, options.seed, Pop2Draw{spec.sigma});
  return sample;
}

Sample simulate_serial(const Pop2Spec& spec, const SimulateOptions& options) {
  if (!(spec.sigma > 0.0)) throw ValidationError("sigma must be > 0");
  Sample sample = allocate_sample(options, 2, 1, true);
  fill_serial(sample, options.seed, Pop2Draw{spec.sigma});
  return sample;
}

}  // namespace tbp
