#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "tbp/bias.hpp"
#include "tbp/metrics.hpp"
#include "tbp/pop1.hpp"
#include "tbp/pop2.hpp"
#include "tbp/sample.hpp"

namespace tbp {

// Insertion-ordered JSON keeps report keys in a stable order, which the
// byte-reproducibility guarantee relies on.
using Json = nlohmann::ordered_json;

// Doubles are serialized with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Sample CSV: header y,a,x1,...,xd,z1,...,zp[,y0,y1][,h] plus any extra
// named numeric columns.
void write_sample_csv(const Sample& sample, std::ostream& os);
Sample read_sample_csv(std::istream& is);

// Curve CSV: kind,x,y rows.
void write_curve_csv(std::span<const CurvePoints> curves, std::ostream& os);

// Sweep CSV: beta1,a13_minus_a03,bias_11,bias_10,bias_01,bias_00,region.
void write_sweep_csv(const SweepTable& table, std::ostream& os);

Json metric_report_json(const MetricReport& report);
Json deviation_report_json(double cb_adjusted, double cb_naive, double cb_dev,
                           std::span<const DeviationPoint> calib_dev);

// Population config files: {"alpha0":[...],"alpha1":[...],"beta":[...],
// "p":{"111":...,...,"000":...}} or {"sigma":...}.
Pop1Spec pop1_spec_from_json(const Json& j);
Pop2Spec pop2_spec_from_json(const Json& j);
Json pop1_spec_to_json(const Pop1Spec& spec);

}  // namespace tbp
