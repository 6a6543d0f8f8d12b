#include "sfdel/sites_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sfdel/errors.hpp"

namespace sfdel {

namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& path,
                    std::size_t line_no) {
  std::size_t a = field.find_first_not_of(" \t");
  std::size_t b = field.find_last_not_of(" \t");
  if (a == std::string::npos)
    throw DataError(path + ":" + std::to_string(line_no) + ": empty numeric field");
  double v = 0.0;
  const char* first = field.data() + a;
  const char* last = field.data() + b + 1;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": cannot parse number '" + field + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> coordinate_names(int d) {
  if (d == 1) return {"x"};
  if (d == 2) return {"x", "y"};
  std::vector<std::string> names;
  for (int i = 1; i <= d; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace

void write_sites_csv(const SiteSample& sample, const std::string& path) {
  const int d = sample.dim();
  if (sample.n() == 0) throw UsageError("write_sites_csv: empty sample");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");

  const std::vector<std::string> coords = coordinate_names(d);
  for (int c = 0; c < d; ++c) os << (c ? "," : "") << coords[static_cast<std::size_t>(c)];
  if (sample.has_values()) os << ",z";
  os << "\n";
  for (Eigen::Index i = 0; i < sample.n(); ++i) {
    for (int c = 0; c < d; ++c)
      os << (c ? "," : "") << format_double(sample.sites(i, c));
    if (sample.has_values()) os << "," << format_double(sample.values[i]);
    os << "\n";
  }
  if (!os) throw DataError("failed writing '" + path + "'");
  os.close();

  nlohmann::ordered_json meta;
  meta["lambda"] = sample.lambda;
  meta["region"]["lo"] = std::vector<double>(
      sample.region.lo().data(), sample.region.lo().data() + d);
  meta["region"]["hi"] = std::vector<double>(
      sample.region.hi().data(), sample.region.hi().data() + d);
  std::ofstream ms(path + ".meta.json", std::ios::binary);
  if (!ms) throw DataError("cannot open '" + path + ".meta.json' for writing");
  ms << meta.dump(2) << "\n";
  if (!ms) throw DataError("failed writing '" + path + ".meta.json'");
}

SiteSample read_sites_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path + "'");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  if (first == lines.size()) throw DataError(path + ": empty file");

  const std::vector<std::string> header = split_csv(lines[first]);
  const bool has_values = header.back() == "z";
  const int d = static_cast<int>(header.size()) - (has_values ? 1 : 0);
  if (d < 1) throw DataError(path + ": header has no coordinate columns");
  const std::vector<std::string> expect = coordinate_names(d);
  for (int c = 0; c < d; ++c) {
    if (header[static_cast<std::size_t>(c)] != expect[static_cast<std::size_t>(c)])
      throw DataError(path + ":1: unexpected header column '" +
                      header[static_cast<std::size_t>(c)] + "' (expected '" +
                      expect[static_cast<std::size_t>(c)] + "')");
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t li = first + 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::vector<std::string> fields = split_csv(lines[li]);
    if (fields.size() != header.size())
      throw DataError(path + ":" + std::to_string(li + 1) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, li + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  SiteSample sample;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  sample.sites.resize(n, d);
  if (has_values) sample.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c)
      sample.sites(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    if (has_values)
      sample.values[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
  }

  const std::string meta_path = path + ".meta.json";
  std::ifstream ms(meta_path, std::ios::binary);
  if (ms) {
    nlohmann::json meta;
    try {
      ms >> meta;
      sample.lambda = meta.at("lambda").get<double>();
      const auto lo = meta.at("region").at("lo").get<std::vector<double>>();
      const auto hi = meta.at("region").at("hi").get<std::vector<double>>();
      if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
        throw DataError(meta_path + ": region dimension does not match csv");
      sample.region = PrototypeRegion(
          Eigen::Map<const Eigen::VectorXd>(lo.data(), d),
          Eigen::Map<const Eigen::VectorXd>(hi.data(), d));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(meta_path + ": " + e.what());
    }
    if (!(sample.lambda > 0.0))
      throw DataError(meta_path + ": lambda must be positive");
    // Sites must lie in the scaled region (up to a relative slack for
    // round-trip rounding).
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        const double slack =
            1e-9 * sample.lambda *
            (sample.region.hi()[c] - sample.region.lo()[c]);
        const double v = sample.sites(i, c);
        if (v < sample.lambda * sample.region.lo()[c] - slack ||
            v > sample.lambda * sample.region.hi()[c] + slack)
          throw DataError(path + ":" + std::to_string(i + 2) +
                          ": site outside the scaled sampling region");
      }
    }
    sample.region_inferred = false;
  } else {
    // No sidecar: assume the canonical unit prototype region centered at the
    // origin and the smallest scale (at least 1) that encloses every site.
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c)
        max_abs = std::max(max_abs, std::abs(sample.sites(i, c)));
    sample.lambda = std::max(1.0, 2.0 * max_abs * (1.0 + 1e-9));
    sample.region = PrototypeRegion::unit(d);
    sample.region_inferred = true;
    warn("no sidecar metadata for '" + path + "': inferred lambda = " +
         format_double(sample.lambda) + " with the unit prototype region");
  }
  return sample;
}

}  // namespace sfdel
