#include "tbp/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "tbp/errors.hpp"

namespace tbp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, std::size_t row) {
  double v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw CsvError("malformed numeric field '" + field + "'", row);
  return v;
}

// x1..xd / z1..zp style column index; 0 when the name does not match.
std::size_t numbered_column(const std::string& name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return 0;
  std::size_t idx = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return 0;
    idx = idx * 10 + static_cast<std::size_t>(name[i] - '0');
  }
  return idx;
}

}  // namespace

void write_sample_csv(const Sample& sample, std::ostream& os) {
  os << "y,a";
  for (std::size_t j = 0; j < sample.x_cols.size(); ++j) os << ",x" << j + 1;
  for (std::size_t j = 0; j < sample.z_cols.size(); ++j) os << ",z" << j + 1;
  if (sample.has_counterfactuals()) os << ",y0,y1";
  if (!sample.h.empty()) os << ",h";
  for (const auto& [name, col] : sample.extras) os << "," << name;
  os << "\n";

  for (std::size_t i = 0; i < sample.size(); ++i) {
    os << format_double(sample.y[i]) << "," << static_cast<int>(sample.a[i]);
    for (const auto& col : sample.x_cols) os << "," << format_double(col[i]);
    for (const auto& col : sample.z_cols) os << "," << format_double(col[i]);
    if (sample.has_counterfactuals())
      os << "," << format_double(sample.y0[i]) << "," << format_double(sample.y1[i]);
    if (!sample.h.empty()) os << "," << format_double(sample.h[i]);
    for (const auto& [name, col] : sample.extras) os << "," << format_double(col[i]);
    os << "\n";
  }
}

Sample read_sample_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw CsvError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto names = split_csv_line(line);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t col_y = kNone, col_a = kNone, col_y0 = kNone, col_y1 = kNone, col_h = kNone;
  std::vector<std::pair<std::size_t, std::size_t>> x_map, z_map;  // (column, 1-based index)
  std::vector<std::pair<std::size_t, std::string>> extra_map;

  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string& name = names[c];
    if (name == "y")
      col_y = c;
    else if (name == "a")
      col_a = c;
    else if (name == "y0")
      col_y0 = c;
    else if (name == "y1")
      col_y1 = c;
    else if (name == "h")
      col_h = c;
    else if (std::size_t xi = numbered_column(name, 'x'); xi > 0)
      x_map.emplace_back(c, xi);
    else if (std::size_t zi = numbered_column(name, 'z'); zi > 0)
      z_map.emplace_back(c, zi);
    else if (!name.empty())
      extra_map.emplace_back(c, name);
    else
      throw CsvError("empty column name", 1);
  }
  if (col_y == kNone) throw CsvError("missing column 'y'", 1);
  if (col_a == kNone) throw CsvError("missing column 'a'", 1);
  if (x_map.empty()) throw CsvError("missing covariate columns 'x1..'", 1);
  if ((col_y0 == kNone) != (col_y1 == kNone))
    throw CsvError("columns 'y0' and 'y1' must appear together", 1);

  auto by_index = [](const auto& a, const auto& b) { return a.second < b.second; };
  std::sort(x_map.begin(), x_map.end(), by_index);
  std::sort(z_map.begin(), z_map.end(), by_index);
  for (std::size_t j = 0; j < x_map.size(); ++j)
    if (x_map[j].second != j + 1) throw CsvError("covariate columns 'x..' are not contiguous", 1);
  for (std::size_t j = 0; j < z_map.size(); ++j)
    if (z_map[j].second != j + 1) throw CsvError("covariate columns 'z..' are not contiguous", 1);

  Sample sample;
  sample.x_cols.resize(x_map.size());
  sample.z_cols.resize(z_map.size());
  for (const auto& [c, name] : extra_map) sample.extras.emplace_back(name, std::vector<double>{});

  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != names.size())
      throw CsvError("expected " + std::to_string(names.size()) + " fields, got " +
                         std::to_string(fields.size()),
                     row);

    sample.y.push_back(parse_double(fields[col_y], row));
    const double a = parse_double(fields[col_a], row);
    if (a != 0.0 && a != 1.0) throw CsvError("treatment indicator must be 0 or 1", row);
    sample.a.push_back(a == 1.0 ? 1 : 0);
    for (std::size_t j = 0; j < x_map.size(); ++j)
      sample.x_cols[j].push_back(parse_double(fields[x_map[j].first], row));
    for (std::size_t j = 0; j < z_map.size(); ++j)
      sample.z_cols[j].push_back(parse_double(fields[z_map[j].first], row));
    if (col_y0 != kNone) {
      sample.y0.push_back(parse_double(fields[col_y0], row));
      sample.y1.push_back(parse_double(fields[col_y1], row));
    }
    if (col_h != kNone) sample.h.push_back(parse_double(fields[col_h], row));
    for (std::size_t j = 0; j < extra_map.size(); ++j)
      sample.extras[j].second.push_back(parse_double(fields[extra_map[j].first], row));
  }
  return sample;
}

void write_curve_csv(std::span<const CurvePoints> curves, std::ostream& os) {
  os << "kind,x,y\n";
  for (const auto& curve : curves) {
    const char* kind = curve.kind == CurveKind::rcc ? "rcc" : "calibration";
    for (const auto& [x, y] : curve.points)
      os << kind << "," << format_double(x) << "," << format_double(y) << "\n";
  }
}

void write_sweep_csv(const SweepTable& table, std::ostream& os) {
  os << "beta1,a13_minus_a03,bias_11,bias_10,bias_01,bias_00,region\n";
  for (const auto& row : table.rows) {
    os << format_double(row.beta1) << "," << format_double(row.a13_minus_a03);
    for (double b : row.abs_bias) os << "," << format_double(b);
    os << "," << row.region << "\n";
  }
}

Json metric_report_json(const MetricReport& report) {
  Json j;
  j["tau_star"] = report.tau_star;
  j["maxlike"] = report.maxlike;
  j["cb"] = report.cb;
  j["gini_b"] = report.gini_b;
  j["n"] = report.n;
  j["flags"] = report.flags;
  return j;
}

Json deviation_report_json(double cb_adjusted, double cb_naive, double cb_dev,
                           std::span<const DeviationPoint> calib_dev) {
  Json j;
  j["cb_adjusted"] = cb_adjusted;
  j["cb_naive"] = cb_naive;
  j["cb_deviation"] = cb_dev;
  Json points = Json::array();
  for (const auto& point : calib_dev) {
    Json p;
    p["h"] = point.h;
    p["value"] = point.value;
    points.push_back(std::move(p));
  }
  j["calib_dev"] = std::move(points);
  return j;
}

namespace {

template <std::size_t N>
std::array<double, N> json_array(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != N)
    throw ValidationError(std::string("key '") + key + "' must be an array of " +
                          std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = a.at(i).get<double>();
  return out;
}

}  // namespace

Pop1Spec pop1_spec_from_json(const Json& j) {
  Pop1Spec spec;
  spec.alpha0 = json_array<4>(j, "alpha0");
  spec.alpha1 = json_array<4>(j, "alpha1");
  spec.beta = json_array<2>(j, "beta");
  if (!j.contains("p") || !j.at("p").is_object())
    throw ValidationError("missing key 'p' (object keyed by x1 x2 z digits)");
  const Json& p = j.at("p");
  for (int x1 : {0, 1})
    for (int x2 : {0, 1})
      for (int z : {0, 1}) {
        const std::string key =
            std::to_string(x1) + std::to_string(x2) + std::to_string(z);
        if (!p.contains(key)) throw ValidationError("missing p cell '" + key + "'");
        spec.p[Pop1Spec::cell_index(x1, x2, z)] = p.at(key).get<double>();
      }
  return spec;
}

Pop2Spec pop2_spec_from_json(const Json& j) {
  Pop2Spec spec;
  if (j.contains("sigma")) spec.sigma = j.at("sigma").get<double>();
  if (!(spec.sigma > 0.0)) throw ValidationError("sigma must be > 0");
  return spec;
}

Json pop1_spec_to_json(const Pop1Spec& spec) {
  Json j;
  j["alpha0"] = spec.alpha0;
  j["alpha1"] = spec.alpha1;
  j["beta"] = spec.beta;
  Json p;
  for (int x1 : {1, 0})
    for (int x2 : {1, 0})
      for (int z : {1, 0}) {
        const std::string key =
            std::to_string(x1) + std::to_string(x2) + std::to_string(z);
        p[key] = spec.mass(x1, x2, z);
      }
  j["p"] = std::move(p);
  return j;
}

}  // namespace tbp
