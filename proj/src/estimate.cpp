#include "tbp/estimate.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tbp/errors.hpp"

namespace tbp {

namespace {

using CellKey = std::vector<double>;

// Exact-equality cell key over the discrete covariates.
std::vector<CellKey> cell_keys(const Sample& sample, bool include_z) {
  std::vector<CellKey> keys(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    CellKey& key = keys[i];
    key.reserve(sample.x_cols.size() + (include_z ? sample.z_cols.size() : 0));
    for (const auto& col : sample.x_cols) key.push_back(col[i]);
    if (include_z)
      for (const auto& col : sample.z_cols) key.push_back(col[i]);
  }
  return keys;
}

std::string cell_name(const CellKey& key, const Sample& sample, bool include_z) {
  std::ostringstream os;
  os << "(";
  std::size_t k = 0;
  for (std::size_t j = 0; j < sample.x_cols.size(); ++j, ++k)
    os << (j ? ", " : "") << "x" << j + 1 << "=" << key[k];
  if (include_z)
    for (std::size_t j = 0; j < sample.z_cols.size(); ++j, ++k)
      os << ", z" << j + 1 << "=" << key[k];
  os << ")";
  return os.str();
}

double clip(double e, double epsilon, std::size_t& clip_count) {
  if (e < epsilon) {
    ++clip_count;
    return epsilon;
  }
  if (e > 1.0 - epsilon) {
    ++clip_count;
    return 1.0 - epsilon;
  }
  return e;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("clip epsilon must be in (0, 0.5)");
}

void check_nonempty(const Sample& sample) {
  if (sample.size() == 0) throw std::invalid_argument("empty sample");
}

}  // namespace

PropensityEstimate estimate_propensity(const Sample& sample, double epsilon, bool include_z) {
  check_epsilon(epsilon);
  check_nonempty(sample);
  const auto keys = cell_keys(sample, include_z);

  struct Agg {
    double sum = 0;
    std::size_t count = 0;
  };
  std::map<CellKey, Agg> cells;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    Agg& agg = cells[keys[i]];
    agg.sum += sample.a[i];
    agg.count += 1;
  }

  PropensityEstimate out;
  out.method = PropensityEstimate::Method::saturated;
  out.epsilon = epsilon;
  out.e_hat.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Agg& agg = cells.at(keys[i]);
    out.e_hat[i] = clip(agg.sum / static_cast<double>(agg.count), epsilon, out.clip_count);
  }
  return out;
}

PropensityEstimate known_propensity(std::vector<double> e, double epsilon) {
  check_epsilon(epsilon);
  PropensityEstimate out;
  out.method = PropensityEstimate::Method::known;
  out.epsilon = epsilon;
  out.e_hat = std::move(e);
  for (auto& v : out.e_hat) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite propensity value");
    v = clip(v, epsilon, out.clip_count);
  }
  return out;
}

TauEstimate outcome_regression_tau(const Sample& sample, bool include_z) {
  check_nonempty(sample);
  const auto keys = cell_keys(sample, include_z);

  struct Agg {
    double sum1 = 0, sum0 = 0;
    std::size_t n1 = 0, n0 = 0;
  };
  std::map<CellKey, Agg> cells;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    Agg& agg = cells[keys[i]];
    if (sample.a[i]) {
      agg.sum1 += sample.y[i];
      agg.n1 += 1;
    } else {
      agg.sum0 += sample.y[i];
      agg.n0 += 1;
    }
  }

  std::vector<std::string> single_arm;
  for (const auto& [key, agg] : cells)
    if (agg.n1 == 0 || agg.n0 == 0)
      single_arm.push_back(cell_name(key, sample, include_z));
  if (!single_arm.empty()) {
    std::string msg = "single-arm cell(s): ";
    for (std::size_t i = 0; i < single_arm.size(); ++i)
      msg += (i ? ", " : "") + single_arm[i];
    throw SingleArmCellError(msg, std::move(single_arm));
  }

  TauEstimate out;
  out.method = TauEstimate::Method::outcome_regression;
  out.cells_used = cells.size();
  out.tau_hat.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Agg& agg = cells.at(keys[i]);
    out.tau_hat[i] = agg.sum1 / static_cast<double>(agg.n1) -
                     agg.sum0 / static_cast<double>(agg.n0);
  }
  return out;
}

TauEstimate ipw_tau(const Sample& sample, const PropensityEstimate& propensity,
                    double clip_epsilon) {
  check_epsilon(clip_epsilon);
  check_nonempty(sample);
  if (propensity.e_hat.size() != sample.size())
    throw std::invalid_argument("propensity length does not match sample");

  TauEstimate out;
  out.method = TauEstimate::Method::ipw;
  out.clip_count = 0;

  std::vector<double> phi(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double e = clip(propensity.e_hat[i], clip_epsilon, out.clip_count);
    phi[i] = sample.y[i] * (static_cast<double>(sample.a[i]) - e) / (e * (1.0 - e));
    if (!std::isfinite(phi[i]))
      throw std::logic_error("non-finite IPW pseudo-outcome after clipping");
  }

  const auto keys = cell_keys(sample, true);
  struct Agg {
    double sum = 0;
    std::size_t count = 0;
  };
  std::map<CellKey, Agg> cells;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    Agg& agg = cells[keys[i]];
    agg.sum += phi[i];
    agg.count += 1;
  }
  out.cells_used = cells.size();
  out.tau_hat.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Agg& agg = cells.at(keys[i]);
    out.tau_hat[i] = agg.sum / static_cast<double>(agg.count);
  }

  // count records clipped at propensity construction as well
  out.clip_count += propensity.clip_count;
  if (out.clip_count * 10 > sample.size())
    out.flags.push_back("clip fraction exceeds 10%");
  return out;
}

TauEstimate provided_tau(std::span<const double> tau) {
  if (tau.empty()) throw std::invalid_argument("empty sample");
  TauEstimate out;
  out.method = TauEstimate::Method::provided;
  out.tau_hat.assign(tau.begin(), tau.end());
  for (std::size_t i = 0; i < out.tau_hat.size(); ++i)
    if (!std::isfinite(out.tau_hat[i]))
      throw std::invalid_argument("non-finite value at index " + std::to_string(i));
  return out;
}

}  // namespace tbp
