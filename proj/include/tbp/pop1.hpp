#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace tbp {

// 18-parameter binary-outcome population: Bernoulli outcome means linear in
// (x1, x2, z) per treatment arm, a propensity linear in z, and an 8-cell
// joint law for the binary covariates.
struct Pop1Spec {
  std::array<double, 4> alpha0{};  // control-arm coefficients on (1, x1, x2, z)
  std::array<double, 4> alpha1{};  // treated-arm coefficients
  std::array<double, 2> beta{};    // propensity e(z) = beta[0] + beta[1] z
  std::array<double, 8> p{};       // covariate cell masses, see cell_index

  static constexpr std::size_t cell_index(int x1, int x2, int z) {
    return static_cast<std::size_t>(x1 * 4 + x2 * 2 + z);
  }

  double mass(int x1, int x2, int z) const { return p[cell_index(x1, x2, z)]; }
  double propensity(int z) const { return beta[0] + beta[1] * static_cast<double>(z); }

  double mu(int arm, int x1, int x2, int z) const {
    const auto& a = arm ? alpha1 : alpha0;
    return a[0] + a[1] * x1 + a[2] * x2 + a[3] * z;
  }

  double tau(int x1, int x2, int z) const { return mu(1, x1, x2, z) - mu(0, x1, x2, z); }
};

// Proof-of-validation wrapper; obtained only through validate_pop1_spec.
class ValidatedPop1Spec {
public:
  const Pop1Spec& get() const { return spec_; }

private:
  explicit ValidatedPop1Spec(Pop1Spec spec) : spec_(spec) {}
  friend ValidatedPop1Spec validate_pop1_spec(const Pop1Spec&);

  Pop1Spec spec_;
};

// Accepts iff (a) all 8 covariate masses are >= 0 and sum to 1 within 1e-12,
// (b) every Bernoulli outcome mean lies in [0, 1] over the 8 cells and both
// arms, and (c) the propensity lies strictly inside (0, 1) for both z.
// Violations of (c) alone raise OverlapError; anything else ValidationError.
// Every violated constraint is reported with its offending cell.
ValidatedPop1Spec validate_pop1_spec(const Pop1Spec& spec);

struct JointCell {
  int x1 = 0, x2 = 0, z = 0;
  double mass = 0;
  double mu0 = 0, mu1 = 0;
  double e = 0;
  double tau = 0;
};

// Exact 8-cell distribution with the per-x aggregates used everywhere else:
// the X marginal, P(Z=1 | X=x), and tau_s(x) = E[tau(X,Z) | X=x].
struct JointTable {
  std::array<JointCell, 8> cells{};     // index = Pop1Spec::cell_index
  std::array<double, 4> p_x{};          // index = x_index
  std::array<double, 4> p_z1_given_x{}; // 0 where the x cell has no mass
  std::array<double, 4> tau_s{};

  static constexpr std::size_t x_index(int x1, int x2) {
    return static_cast<std::size_t>(x1 * 2 + x2);
  }

  const JointCell& cell(int x1, int x2, int z) const {
    return cells[Pop1Spec::cell_index(x1, x2, z)];
  }
};

JointTable pop1_joint_table(const ValidatedPop1Spec& spec);

enum class Pop1TbpKind { h1, h2, h3 };

std::string_view to_string(Pop1TbpKind kind);
std::optional<Pop1TbpKind> pop1_tbp_from_string(std::string_view name);

// Coefficients making h2 moderately calibrated and h3 strongly calibrated
// (h3 reproduces tau_s pointwise). Throws ValidationError("degenerate
// covariate cell ...") when a conditioning denominator vanishes.
struct Pop1TbpCoefficients {
  std::array<double, 3> b{};  // h2 = b0 + b1 (x1 + x2) + b2 x1 x2
  std::array<double, 4> c{};  // h3 = c0 + c1 x1 + c2 x2 + c3 x1 x2
};

Pop1TbpCoefficients pop1_tbp_coefficients(const JointTable& table);

struct Pop1Tbp {
  Pop1TbpKind kind = Pop1TbpKind::h1;
  Pop1TbpCoefficients coef{};

  double predict(int x1, int x2) const;
};

Pop1Tbp make_pop1_tbp(Pop1TbpKind kind, const JointTable& table);

}  // namespace tbp
