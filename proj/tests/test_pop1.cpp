#include <doctest.h>

#include <cmath>

#include "tbp/errors.hpp"
#include "tbp/io.hpp"
#include "tbp/pop1.hpp"
#include "tbp/rng.hpp"

#include "support.hpp"

using tbp::JointTable;
using tbp::Pop1Spec;
using tbp::Pop1TbpKind;

namespace {

// E[tau(X,Z) | H = level] by direct summation, for calibration checks.
double level_mean(const JointTable& table, const tbp::Pop1Tbp& tbp, double level) {
  double mass = 0.0, sum = 0.0;
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      if (tbp.predict(x1, x2) != level) continue;
      const std::size_t xi = JointTable::x_index(x1, x2);
      mass += table.p_x[xi];
      sum += table.tau_s[xi] * table.p_x[xi];
    }
  return sum / mass;
}

}  // namespace

TEST_CASE("validation accepts the shipped population") {
  CHECK_NOTHROW(tbp_test::shipped_pop1_spec());
  CHECK_NOTHROW(tbp::validate_pop1_spec(tbp_test::rounded_pop1_spec()));
}

TEST_CASE("validation rejects an out-of-range propensity") {
  Pop1Spec spec = tbp_test::rounded_pop1_spec();
  spec.beta[1] = 0.95;  // beta0 + beta1 = 1.07
  CHECK_THROWS_AS(tbp::validate_pop1_spec(spec), tbp::ValidationError);
  spec.beta[1] = 0.88;  // exactly 1.0: degenerate but a legal Bernoulli mean
  CHECK_THROWS_AS(tbp::validate_pop1_spec(spec), tbp::OverlapError);
}

TEST_CASE("validation rejects bad masses and means") {
  Pop1Spec spec = tbp_test::rounded_pop1_spec();
  for (auto& mass : spec.p) mass *= 0.9;
  CHECK_THROWS_WITH_AS(tbp::validate_pop1_spec(spec),
                       doctest::Contains("masses must sum to 1"), tbp::ValidationError);

  spec = tbp_test::rounded_pop1_spec();
  const auto i = Pop1Spec::cell_index(0, 1, 1);
  const auto j = Pop1Spec::cell_index(0, 1, 0);
  spec.p[j] += spec.p[i] + 0.01;
  spec.p[i] = -0.01;
  CHECK_THROWS_WITH_AS(tbp::validate_pop1_spec(spec),
                       doctest::Contains("negative mass at cell (x1=0, x2=1, z=1)"),
                       tbp::ValidationError);

  spec = tbp_test::rounded_pop1_spec();
  spec.alpha1[1] = 0.9;  // treated mean exceeds 1 for x1=1 cells
  CHECK_THROWS_WITH_AS(tbp::validate_pop1_spec(spec), doctest::Contains("Bernoulli mean"),
                       tbp::ValidationError);
}

TEST_CASE("validation does not depend on key order in the config") {
  auto doc = tbp_test::load_json(tbp_test::asset_path("pop1.json"));
  tbp::Json shuffled;
  shuffled["p"] = tbp::Json::object();
  for (const char* key : {"000", "010", "111", "001", "100", "011", "110", "101"})
    shuffled["p"][key] = doc["p"][key];
  shuffled["beta"] = doc["beta"];
  shuffled["alpha1"] = doc["alpha1"];
  shuffled["alpha0"] = doc["alpha0"];
  const Pop1Spec a = tbp::pop1_spec_from_json(doc);
  const Pop1Spec b = tbp::pop1_spec_from_json(shuffled);
  CHECK(a.p == b.p);
  CHECK_NOTHROW(tbp::validate_pop1_spec(b));
}

TEST_CASE("joint table cells") {
  const auto table =
      tbp::pop1_joint_table(tbp::validate_pop1_spec(tbp_test::rounded_pop1_spec()));
  const auto& c000 = table.cell(0, 0, 0);
  CHECK(c000.mu0 == doctest::Approx(0.629).epsilon(1e-14));
  CHECK(c000.mu1 == doctest::Approx(0.335).epsilon(1e-14));
  CHECK(c000.tau == doctest::Approx(-0.294).epsilon(1e-12));
  CHECK(c000.e == doctest::Approx(0.120).epsilon(1e-14));

  const auto& c111 = table.cell(1, 1, 1);
  CHECK(c111.tau == doctest::Approx(0.384).epsilon(1e-12));
  CHECK(c111.e == doctest::Approx(0.8821).epsilon(1e-14));

  // tau_s is the P(Z|X)-weighted mix of the two z cells
  for (int x1 : {0, 1})
    for (int x2 : {0, 1}) {
      const std::size_t xi = JointTable::x_index(x1, x2);
      const double pz1 = table.p_z1_given_x[xi];
      const double expected =
          table.cell(x1, x2, 0).tau * (1.0 - pz1) + table.cell(x1, x2, 1).tau * pz1;
      CHECK(table.tau_s[xi] == doctest::Approx(expected).epsilon(1e-14));
    }

  double mass = 0.0;
  for (const auto& cell : table.cells) mass += cell.mass;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("identical arms give zero effect everywhere") {
  Pop1Spec spec = tbp_test::rounded_pop1_spec();
  spec.alpha1 = spec.alpha0;
  const auto table = tbp::pop1_joint_table(tbp::validate_pop1_spec(spec));
  for (const auto& cell : table.cells) CHECK(cell.tau == 0.0);
  for (double tau_s : table.tau_s) CHECK(tau_s == 0.0);
}

TEST_CASE("h3 reproduces tau_s and h2 is calibrated, shipped population") {
  const auto table = tbp::pop1_joint_table(tbp_test::shipped_pop1_spec());
  const auto h3 = tbp::make_pop1_tbp(Pop1TbpKind::h3, table);
  for (int x1 : {0, 1})
    for (int x2 : {0, 1})
      CHECK(std::abs(h3.predict(x1, x2) - table.tau_s[JointTable::x_index(x1, x2)]) < 1e-12);

  const auto h2 = tbp::make_pop1_tbp(Pop1TbpKind::h2, table);
  for (double level : {h2.predict(0, 0), h2.predict(1, 0), h2.predict(1, 1)})
    CHECK(std::abs(level_mean(table, h2, level) - level) < 1e-12);
  CHECK(h2.predict(1, 0) == h2.predict(0, 1));
}

TEST_CASE("calibration identities hold across random populations") {
  tbp::Rng rng(60601);
  int built = 0;
  while (built < 50) {
    const Pop1Spec raw = tbp_test::random_pop1_spec(rng);
    tbp::JointTable table;
    try {
      table = tbp::pop1_joint_table(tbp::validate_pop1_spec(raw));
    } catch (const tbp::ValidationError&) {
      continue;
    }
    ++built;
    const auto h3 = tbp::make_pop1_tbp(Pop1TbpKind::h3, table);
    for (int x1 : {0, 1})
      for (int x2 : {0, 1})
        CHECK(std::abs(h3.predict(x1, x2) - table.tau_s[JointTable::x_index(x1, x2)]) < 1e-12);
    const auto h2 = tbp::make_pop1_tbp(Pop1TbpKind::h2, table);
    for (double level : {h2.predict(0, 0), h2.predict(1, 0), h2.predict(1, 1)})
      CHECK(std::abs(level_mean(table, h2, level) - level) < 1e-12);
  }
}

TEST_CASE("degenerate covariate cell is rejected by the coefficient solve") {
  Pop1Spec spec = tbp_test::rounded_pop1_spec();
  const auto i1 = Pop1Spec::cell_index(0, 0, 1);
  const auto i0 = Pop1Spec::cell_index(0, 0, 0);
  spec.p[Pop1Spec::cell_index(1, 1, 0)] += spec.p[i1] + spec.p[i0];
  spec.p[i1] = spec.p[i0] = 0.0;
  const auto table = tbp::pop1_joint_table(tbp::validate_pop1_spec(spec));
  CHECK_THROWS_WITH_AS(tbp::pop1_tbp_coefficients(table),
                       "degenerate covariate cell x=(0,0)", tbp::ValidationError);
}

TEST_CASE("interaction coefficient vanishes without a z effect difference") {
  Pop1Spec spec = tbp_test::rounded_pop1_spec();
  spec.alpha0[3] = 0.0;
  spec.alpha1[3] = 0.0;
  const auto table = tbp::pop1_joint_table(tbp::validate_pop1_spec(spec));
  CHECK(tbp::pop1_tbp_coefficients(table).c[3] == 0.0);
}

TEST_CASE("predictor values") {
  const auto table = tbp::pop1_joint_table(tbp_test::shipped_pop1_spec());
  const auto h1 = tbp::make_pop1_tbp(Pop1TbpKind::h1, table);
  CHECK(h1.predict(1, 0) == 0.5);
  CHECK(h1.predict(0, 0) == 0.0);
  CHECK(h1.predict(1, 1) == 1.0);

  const auto coef = tbp::pop1_tbp_coefficients(table);
  const auto h2 = tbp::make_pop1_tbp(Pop1TbpKind::h2, table);
  CHECK(h2.predict(0, 0) == coef.b[0]);
  const auto h3 = tbp::make_pop1_tbp(Pop1TbpKind::h3, table);
  CHECK(h3.predict(1, 1) ==
        doctest::Approx(coef.c[0] + coef.c[1] + coef.c[2] + coef.c[3]).epsilon(1e-15));
}

TEST_CASE("predictor names") {
  CHECK(tbp::pop1_tbp_from_string("h2") == Pop1TbpKind::h2);
  CHECK(!tbp::pop1_tbp_from_string("h4").has_value());
  CHECK(tbp::to_string(Pop1TbpKind::h1) == "h1");
}
