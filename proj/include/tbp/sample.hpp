#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tbp {

// Column-wise record set, either produced by a simulator or ingested from
// CSV. Optional columns are empty when absent. When counterfactuals are
// retained, y = a * y1 + (1 - a) * y0 holds record-wise.
struct Sample {
  enum class Provenance { simulated, ingested };

  std::vector<double> y;
  std::vector<std::uint8_t> a;
  std::vector<std::vector<double>> x_cols;
  std::vector<std::vector<double>> z_cols;
  std::vector<double> y0;  // optional
  std::vector<double> y1;  // optional
  std::vector<double> h;   // optional
  std::vector<std::pair<std::string, std::vector<double>>> extras;

  Provenance provenance = Provenance::ingested;
  std::uint64_t seed = 0;

  std::size_t size() const { return y.size(); }
  bool has_counterfactuals() const { return !y0.empty(); }
};

}  // namespace tbp
