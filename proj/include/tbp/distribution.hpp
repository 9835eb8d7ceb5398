#pragma once

#include <span>
#include <vector>

namespace tbp {

// One support point of a discrete distribution: point mass f(value) together
// with the cumulative F(value) = P(X <= value).
struct Atom {
  double value = 0;
  double mass = 0;
  double cum = 0;
};

// Tie-aware discrete distribution, either empirical (relative frequencies of
// a sample) or exact (enumerated masses). Values compare by exact equality;
// callers quantize upstream if they need coarser ties.
class EmpiricalDistribution {
public:
  // Relative frequencies of the given values; F uses the weak inequality
  // P(X <= h) and f(h) pools all values exactly equal to h.
  static EmpiricalDistribution from_values(std::span<const double> values);

  // Exact construction from (value, mass) pairs; equal values are pooled and
  // masses must be positive and sum to 1 within 1e-12.
  static EmpiricalDistribution from_atoms(std::vector<Atom> atoms);

  double cdf(double h) const;
  double pmf(double h) const;

  // eta(h) = 2F(h) - f(h), the weight that turns the pairwise
  // treat-greater-H expectation into a single-record expectation.
  double eta(double h) const { return 2.0 * cdf(h) - pmf(h); }

  const std::vector<Atom>& atoms() const { return atoms_; }

private:
  std::vector<Atom> atoms_;  // sorted by value, strictly increasing
};

}  // namespace tbp
