#include "tbp/pop1.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tbp/errors.hpp"

namespace tbp {

namespace {

constexpr double kMassTolerance = 1e-12;

std::string cell_name(int x1, int x2, int z) {
  std::ostringstream os;
  os << "(x1=" << x1 << ", x2=" << x2 << ", z=" << z << ")";
  return os.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

}  // namespace

ValidatedPop1Spec validate_pop1_spec(const Pop1Spec& spec) {
  std::vector<std::string> violations;
  std::vector<std::string> overlap_violations;

  for (double v : spec.alpha0)
    if (!std::isfinite(v)) violations.push_back("non-finite alpha0 coefficient");
  for (double v : spec.alpha1)
    if (!std::isfinite(v)) violations.push_back("non-finite alpha1 coefficient");
  for (double v : spec.beta)
    if (!std::isfinite(v)) violations.push_back("non-finite beta coefficient");
  for (double v : spec.p)
    if (!std::isfinite(v)) violations.push_back("non-finite covariate mass");
  if (!violations.empty()) throw ValidationError(join(violations));

  double total = 0.0;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1})
      for (int z : {0, 1}) {
        const double m = spec.mass(x1, x2, z);
        total += m;
        if (m < 0.0)
          violations.push_back("negative mass at cell " + cell_name(x1, x2, z));
        for (int arm : {0, 1}) {
          const double mean = spec.mu(arm, x1, x2, z);
          if (mean < 0.0 || mean > 1.0) {
            std::ostringstream os;
            os << "Bernoulli mean " << mean << " out of [0,1] for arm " << arm
               << " at cell " << cell_name(x1, x2, z);
            violations.push_back(os.str());
          }
        }
      }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os << "masses must sum to 1 (got " << total << ")";
    violations.push_back(os.str());
  }

  for (int z : {0, 1}) {
    const double e = spec.propensity(z);
    if (!(e > 0.0 && e < 1.0)) {
      std::ostringstream os;
      os << "propensity " << e << " at z=" << z << " not in (0,1)";
      overlap_violations.push_back(os.str());
    }
  }

  if (!violations.empty()) {
    for (auto& v : overlap_violations) violations.push_back(std::move(v));
    throw ValidationError(join(violations));
  }
  if (!overlap_violations.empty()) throw OverlapError(join(overlap_violations));
  return ValidatedPop1Spec(spec);
}

JointTable pop1_joint_table(const ValidatedPop1Spec& validated) {
  const Pop1Spec& spec = validated.get();
  JointTable table;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1})
      for (int z : {0, 1}) {
        JointCell& cell = table.cells[Pop1Spec::cell_index(x1, x2, z)];
        cell.x1 = x1;
        cell.x2 = x2;
        cell.z = z;
        cell.mass = spec.mass(x1, x2, z);
        cell.mu0 = spec.mu(0, x1, x2, z);
        cell.mu1 = spec.mu(1, x1, x2, z);
        cell.e = spec.propensity(z);
        cell.tau = cell.mu1 - cell.mu0;
      }
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      const std::size_t xi = JointTable::x_index(x1, x2);
      const double m0 = spec.mass(x1, x2, 0);
      const double m1 = spec.mass(x1, x2, 1);
      table.p_x[xi] = m0 + m1;
      if (table.p_x[xi] > 0.0) {
        const double pz1 = m1 / (m0 + m1);
        table.p_z1_given_x[xi] = pz1;
        table.tau_s[xi] = spec.tau(x1, x2, 0) * (1.0 - pz1) + spec.tau(x1, x2, 1) * pz1;
      }
    }
  return table;
}

std::string_view to_string(Pop1TbpKind kind) {
  switch (kind) {
    case Pop1TbpKind::h1: return "h1";
    case Pop1TbpKind::h2: return "h2";
    case Pop1TbpKind::h3: return "h3";
  }
  return "?";
}

std::optional<Pop1TbpKind> pop1_tbp_from_string(std::string_view name) {
  if (name == "h1") return Pop1TbpKind::h1;
  if (name == "h2") return Pop1TbpKind::h2;
  if (name == "h3") return Pop1TbpKind::h3;
  return std::nullopt;
}

Pop1TbpCoefficients pop1_tbp_coefficients(const JointTable& table) {
  const auto m = [&](int x1, int x2, int z) { return table.cell(x1, x2, z).mass; };

  const double m11 = m(1, 1, 1) + m(1, 1, 0);
  const double m10 = m(1, 0, 1) + m(1, 0, 0);
  const double m01 = m(0, 1, 1) + m(0, 1, 0);
  const double m00 = m(0, 0, 1) + m(0, 0, 0);
  const double mid = m10 + m01;
  if (m11 <= 0.0) throw ValidationError("degenerate covariate cell x=(1,1)");
  if (m10 <= 0.0) throw ValidationError("degenerate covariate cell x=(1,0)");
  if (m01 <= 0.0) throw ValidationError("degenerate covariate cell x=(0,1)");
  if (m00 <= 0.0) throw ValidationError("degenerate covariate cell x=(0,0)");

  // Coefficient differences between the two arms, recovered from the cells.
  const double d0 = table.cell(0, 0, 0).tau;
  const double d1 = table.cell(1, 0, 0).tau - d0;
  const double d2 = table.cell(0, 1, 0).tau - d0;
  const double d3 = table.cell(0, 0, 1).tau - d0;

  const double r11 = m(1, 1, 1) / m11;
  const double r10 = m(1, 0, 1) / m10;
  const double r01 = m(0, 1, 1) / m01;
  const double r00 = m(0, 0, 1) / m00;
  const double rmid = (m(1, 0, 1) + m(0, 1, 1)) / mid;

  Pop1TbpCoefficients coef;
  coef.b[0] = d0 + d3 * r00;
  coef.b[1] = d1 * (m10 / mid) + d2 * (m01 / mid) + d3 * (rmid - r00);
  coef.b[2] = d1 * (1.0 - 2.0 * m10 / mid) + d2 * (1.0 - 2.0 * m01 / mid) +
              d3 * (r11 - 2.0 * rmid + r00);
  coef.c[0] = coef.b[0];
  coef.c[1] = d1 + d3 * (r10 - r00);
  coef.c[2] = d2 + d3 * (r01 - r00);
  coef.c[3] = d3 * (r11 - r10 - r01 + r00);
  return coef;
}

double Pop1Tbp::predict(int x1, int x2) const {
  switch (kind) {
    case Pop1TbpKind::h1:
      return 0.5 * (x1 + x2);
    case Pop1TbpKind::h2:
      return coef.b[0] + coef.b[1] * (x1 + x2) + coef.b[2] * (x1 * x2);
    case Pop1TbpKind::h3:
      return coef.c[0] + coef.c[1] * x1 + coef.c[2] * x2 + coef.c[3] * (x1 * x2);
  }
  return 0.0;
}

Pop1Tbp make_pop1_tbp(Pop1TbpKind kind, const JointTable& table) {
  Pop1Tbp tbp;
  tbp.kind = kind;
  if (kind != Pop1TbpKind::h1) tbp.coef = pop1_tbp_coefficients(table);
  return tbp;
}

}  // namespace tbp
