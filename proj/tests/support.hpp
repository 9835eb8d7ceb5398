#pragma once

#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbp/io.hpp"
#include "tbp/pop1.hpp"
#include "tbp/rng.hpp"

namespace tbp_test {

inline tbp::Json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return tbp::Json::parse(is);
}

inline std::string asset_path(const std::string& name) {
  return std::string(TBP_ASSETS_DIR) + "/" + name;
}

// Canonical binary-population config shipped with the repo.
inline tbp::ValidatedPop1Spec shipped_pop1_spec() {
  return tbp::validate_pop1_spec(tbp::pop1_spec_from_json(load_json(asset_path("pop1.json"))));
}

// Same population but with the coefficients as commonly quoted at three
// decimal places; the covariate masses are normalized to sum to 1.
inline tbp::Pop1Spec rounded_pop1_spec() {
  tbp::Pop1Spec spec;
  spec.alpha0 = {0.629, 0.143, -0.479, -0.058};
  spec.alpha1 = {0.335, 0.304, -0.334, 0.314};
  spec.beta = {0.120, 0.7621};
  const double raw[8] = {0.181, 0.100, 0.035, 0.148, 0.174, 0.087, 0.121, 0.153};
  // order (x1 x2 z) = 111,110,101,100,011,010,001,000
  const int cells[8][3] = {{1, 1, 1}, {1, 1, 0}, {1, 0, 1}, {1, 0, 0},
                           {0, 1, 1}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  double total = 0.0;
  for (double v : raw) total += v;
  for (int k = 0; k < 8; ++k)
    spec.p[tbp::Pop1Spec::cell_index(cells[k][0], cells[k][1], cells[k][2])] = raw[k] / total;
  return spec;
}

// Random valid population specs for property tests.
inline tbp::Pop1Spec random_pop1_spec(tbp::Rng& rng) {
  tbp::Pop1Spec spec;
  spec.alpha0[0] = 0.25 + 0.5 * rng.next_double();
  spec.alpha1[0] = 0.25 + 0.5 * rng.next_double();
  for (int k = 1; k < 4; ++k) {
    spec.alpha0[k] = -0.08 + 0.16 * rng.next_double();
    spec.alpha1[k] = -0.08 + 0.16 * rng.next_double();
  }
  spec.beta[0] = 0.1 + 0.4 * rng.next_double();
  spec.beta[1] = 0.4 * rng.next_double();
  double total = 0.0;
  for (auto& mass : spec.p) {
    mass = 0.05 + rng.next_double();
    total += mass;
  }
  for (auto& mass : spec.p) mass /= total;
  const double sum = std::accumulate(spec.p.begin(), spec.p.end(), 0.0);
  spec.p[0] += 1.0 - sum;
  return spec;
}

// n draws from a small value alphabet, so ties occur with high probability.
inline std::vector<double> random_values(tbp::Rng& rng, std::size_t n, std::size_t alphabet) {
  std::vector<double> out(n);
  for (auto& v : out)
    v = static_cast<double>(rng.next_u64() % alphabet) / static_cast<double>(alphabet);
  return out;
}

}  // namespace tbp_test
