#include <doctest.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "tbp/errors.hpp"
#include "tbp/io.hpp"
#include "tbp/rng.hpp"
#include "tbp/simulate.hpp"

#include "support.hpp"

using tbp::Sample;

TEST_CASE("double formatting round-trips exactly") {
  tbp::Rng rng(2718);
  for (int rep = 0; rep < 1000; ++rep) {
    double v = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<double>(rng.next_u64() % 13) - 6.0);
    const std::string text = tbp::format_double(v);
    double back = 0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("sample CSV round trip") {
  tbp::SimulateOptions o{500, 99, true, tbp::Pop1TbpKind::h2};
  Sample sample = tbp::simulate(tbp_test::shipped_pop1_spec(), o);
  sample.extras.emplace_back("tau_hat", std::vector<double>(sample.size(), 0.25));

  std::stringstream ss;
  tbp::write_sample_csv(sample, ss);
  const Sample back = tbp::read_sample_csv(ss);

  CHECK(back.y == sample.y);
  CHECK(back.a == sample.a);
  CHECK(back.x_cols == sample.x_cols);
  CHECK(back.z_cols == sample.z_cols);
  CHECK(back.y0 == sample.y0);
  CHECK(back.y1 == sample.y1);
  CHECK(back.h == sample.h);
  REQUIRE(back.extras.size() == 1);
  CHECK(back.extras[0].first == "tau_hat");
  CHECK(back.extras[0].second == sample.extras[0].second);
}

TEST_CASE("CSV columns may appear in any header order") {
  std::stringstream ss("h,x2,a,x1,y,z1\n0.5,1,1,0,0.25,1\n1.5,0,0,1,0.75,0\n");
  const Sample sample = tbp::read_sample_csv(ss);
  REQUIRE(sample.size() == 2);
  CHECK(sample.x_cols[0] == std::vector<double>{0, 1});
  CHECK(sample.x_cols[1] == std::vector<double>{1, 0});
  CHECK(sample.z_cols[0] == std::vector<double>{1, 0});
  CHECK(sample.y == std::vector<double>{0.25, 0.75});
  CHECK(sample.h == std::vector<double>{0.5, 1.5});

  // z columns are optional; gaps in the numbering are not
  std::stringstream no_z("y,a,x1\n1,0,1\n");
  CHECK(tbp::read_sample_csv(no_z).z_cols.empty());
  std::stringstream gap("y,a,x1,x3\n1,0,1,1\n");
  CHECK_THROWS_WITH_AS(tbp::read_sample_csv(gap), doctest::Contains("not contiguous"),
                       tbp::CsvError);
}

TEST_CASE("CSV errors carry the row") {
  std::stringstream missing("a,x1\n1,0\n");
  CHECK_THROWS_WITH_AS(tbp::read_sample_csv(missing), doctest::Contains("missing column 'y'"),
                       tbp::CsvError);

  std::stringstream bad_field("y,a,x1\n0.5,1,0\n0.25,oops,1\n");
  try {
    tbp::read_sample_csv(bad_field);
    FAIL("expected CsvError");
  } catch (const tbp::CsvError& e) {
    CHECK(e.row() == 3);
  }

  std::stringstream short_row("y,a,x1\n0.5,1\n");
  CHECK_THROWS_AS(tbp::read_sample_csv(short_row), tbp::CsvError);

  std::stringstream bad_a("y,a,x1\n0.5,2,0\n");
  CHECK_THROWS_WITH_AS(tbp::read_sample_csv(bad_a),
                       doctest::Contains("treatment indicator"), tbp::CsvError);
}

TEST_CASE("curve CSV layout") {
  tbp::CurvePoints curve;
  curve.kind = tbp::CurveKind::rcc;
  curve.points = {{0.0, 0.0}, {0.5, 0.25}, {1.0, 1.0}};
  std::ostringstream os;
  const tbp::CurvePoints curves[] = {curve};
  tbp::write_curve_csv(curves, os);
  CHECK(os.str() == "kind,x,y\nrcc,0,0\nrcc,0.5,0.25\nrcc,1,1\n");
}

TEST_CASE("sweep CSV layout") {
  tbp::SweepTable table;
  tbp::SweepRow row;
  row.beta1 = 0.5;
  row.a13_minus_a03 = 0.25;
  row.abs_bias = {0.125, 0.0625, 0.03125, 0.75};
  row.region = ">0.1";
  row.valid = true;
  table.rows.push_back(row);
  std::ostringstream os;
  tbp::write_sweep_csv(table, os);
  CHECK(os.str() ==
        "beta1,a13_minus_a03,bias_11,bias_10,bias_01,bias_00,region\n"
        "0.5,0.25,0.125,0.0625,0.03125,0.75,>0.1\n");
}

TEST_CASE("population config round trip") {
  const tbp::Pop1Spec spec = tbp_test::shipped_pop1_spec().get();
  const tbp::Pop1Spec back = tbp::pop1_spec_from_json(tbp::pop1_spec_to_json(spec));
  CHECK(back.alpha0 == spec.alpha0);
  CHECK(back.alpha1 == spec.alpha1);
  CHECK(back.beta == spec.beta);
  CHECK(back.p == spec.p);

  tbp::Json j = tbp::pop1_spec_to_json(spec);
  j.erase("beta");
  CHECK_THROWS_WITH_AS(tbp::pop1_spec_from_json(j), doctest::Contains("missing key 'beta'"),
                       tbp::ValidationError);
  j = tbp::pop1_spec_to_json(spec);
  j["p"].erase("010");
  CHECK_THROWS_WITH_AS(tbp::pop1_spec_from_json(j), doctest::Contains("missing p cell '010'"),
                       tbp::ValidationError);
}

TEST_CASE("pop2 config") {
  CHECK(tbp::pop2_spec_from_json(tbp::Json::object()).sigma == 0.1);
  tbp::Json j;
  j["sigma"] = 0.25;
  CHECK(tbp::pop2_spec_from_json(j).sigma == 0.25);
  j["sigma"] = -1.0;
  CHECK_THROWS_AS(tbp::pop2_spec_from_json(j), tbp::ValidationError);
}

TEST_CASE("report JSON schemas") {
  tbp::MetricReport report;
  report.tau_star = 0.4;
  report.maxlike = 0.5;
  report.cb = 0.2;
  report.gini_b = 0.25;
  report.n = 10;
  report.flags = {"E[B] > 0 assumed"};
  const tbp::Json j = tbp::metric_report_json(report);
  for (const char* key : {"tau_star", "maxlike", "cb", "gini_b", "n", "flags"})
    CHECK(j.contains(key));
  CHECK(j["flags"].size() == 1);

  const std::vector<tbp::DeviationPoint> dev{{0.0, 0.1}, {1.0, 0.2}};
  const tbp::Json d = tbp::deviation_report_json(0.6, 0.33, -0.27, dev);
  for (const char* key : {"cb_adjusted", "cb_naive", "cb_deviation", "calib_dev"})
    CHECK(d.contains(key));
  CHECK(d["calib_dev"].size() == 2);
  CHECK(d["calib_dev"][0]["h"] == 0.0);
}
