#include "tbp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tbp/errors.hpp"

namespace tbp {

namespace {

constexpr double kMassTolerance = 1e-12;

void fill_cumulative(std::vector<Atom>& atoms) {
  double cum = 0.0;
  for (auto& a : atoms) {
    cum += a.mass;
    a.cum = cum;
  }
}

}  // namespace

EmpiricalDistribution EmpiricalDistribution::from_values(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("non-finite value at index " + std::to_string(i));
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  EmpiricalDistribution dist;
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    dist.atoms_.push_back({sorted[i], static_cast<double>(j - i) / n, 0.0});
    i = j;
  }
  fill_cumulative(dist.atoms_);
  return dist;
}

EmpiricalDistribution EmpiricalDistribution::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("empty sample");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });

  EmpiricalDistribution dist;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i].value))
      throw std::invalid_argument("non-finite value at index " + std::to_string(i));
    if (!(atoms[i].mass > 0.0))
      throw ValidationError("atom mass must be positive (value " +
                            std::to_string(atoms[i].value) + ")");
    total += atoms[i].mass;
    if (!dist.atoms_.empty() && dist.atoms_.back().value == atoms[i].value)
      dist.atoms_.back().mass += atoms[i].mass;
    else
      dist.atoms_.push_back({atoms[i].value, atoms[i].mass, 0.0});
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw ValidationError("masses must sum to 1 (got " + std::to_string(total) + ")");
  fill_cumulative(dist.atoms_);
  return dist;
}

double EmpiricalDistribution::cdf(double h) const {
  // last atom with value <= h
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), h,
                             [](double v, const Atom& a) { return v < a.value; });
  if (it == atoms_.begin()) return 0.0;
  return std::prev(it)->cum;
}

double EmpiricalDistribution::pmf(double h) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), h,
                             [](const Atom& a, double v) { return a.value < v; });
  if (it != atoms_.end() && it->value == h) return it->mass;
  return 0.0;
}

}  // namespace tbp
