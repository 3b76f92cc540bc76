#include "exlgm/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "exlgm/errors.hpp"

namespace exlgm {

void Dataset::validate() const {
  if (sites.empty()) throw invalid_input("dataset has no sites");
  if (values.rows() != n_sites()) throw invalid_input("dataset: site/value row mismatch");
  if (values.cols() < 1) throw invalid_input("dataset has no replicates");
  std::map<std::int64_t, int> seen;
  for (const auto& s : sites) {
    if (++seen[s.site_id] > 1)
      throw invalid_input("duplicate site_id " + std::to_string(s.site_id));
    if (!std::isfinite(s.lon) || !std::isfinite(s.lat))
      throw invalid_input("non-finite coordinates for site " + std::to_string(s.site_id));
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index t = 0; t < values.cols(); ++t) {
      const double v = values(i, t);
      if (!std::isfinite(v) || v < 0.0)
        throw invalid_input("dataset value at site " + std::to_string(sites[i].site_id) +
                            ", time " + std::to_string(t) + " is negative or non-finite");
    }
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw invalid_input(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  double v;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) parse_fail(path, line, "bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& path, std::size_t line) {
  std::int64_t v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    parse_fail(path, line, "bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open dataset file: " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw invalid_input(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "site_id,lon,lat,time_index,value")
    parse_fail(path, line_no, "expected header 'site_id,lon,lat,time_index,value'");

  struct SiteAccum {
    double lon, lat;
    std::map<std::int64_t, double> by_time;
  };
  std::map<std::int64_t, SiteAccum> accum;
  std::vector<std::int64_t> order;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) parse_fail(path, line_no, "expected 5 fields");
    const std::int64_t sid = parse_int(f[0], path, line_no);
    const double lon = parse_double(f[1], path, line_no);
    const double lat = parse_double(f[2], path, line_no);
    const std::int64_t t = parse_int(f[3], path, line_no);
    const double v = parse_double(f[4], path, line_no);
    if (t < 0) parse_fail(path, line_no, "negative time_index");
    if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite value");
    if (v < 0.0) parse_fail(path, line_no, "negative value");

    auto it = accum.find(sid);
    if (it == accum.end()) {
      order.push_back(sid);
      it = accum.emplace(sid, SiteAccum{lon, lat, {}}).first;
    } else if (it->second.lon != lon || it->second.lat != lat) {
      parse_fail(path, line_no, "inconsistent coordinates for site " + std::to_string(sid));
    }
    if (!it->second.by_time.emplace(t, v).second)
      parse_fail(path, line_no,
                 "duplicate (site_id, time_index) = (" + std::to_string(sid) + ", " +
                     std::to_string(t) + ")");
  }
  if (order.empty()) throw invalid_input(path + ": no data rows");

  const std::size_t T = accum[order.front()].by_time.size();
  Dataset d;
  d.values.resize(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& a = accum[order[i]];
    if (a.by_time.size() != T)
      throw invalid_input(path + ": site " + std::to_string(order[i]) + " has " +
                          std::to_string(a.by_time.size()) + " replicates, expected " +
                          std::to_string(T));
    std::int64_t expect = 0;
    for (const auto& [t, v] : a.by_time) {
      if (t != expect)
        throw invalid_input(path + ": site " + std::to_string(order[i]) +
                            ": time indices must be 0-based and consecutive (missing " +
                            std::to_string(expect) + ")");
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = v;
      ++expect;
    }
    d.sites.push_back({order[i], a.lon, a.lat});
  }
  d.validate();
  return d;
}

void write_dataset(const Dataset& d, const std::string& path) {
  d.validate();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw invalid_input("cannot open for writing: " + path);
  std::fputs("site_id,lon,lat,time_index,value\n", f);
  for (Eigen::Index i = 0; i < d.n_sites(); ++i) {
    const auto& s = d.sites[static_cast<std::size_t>(i)];
    for (Eigen::Index t = 0; t < d.n_times(); ++t)
      std::fprintf(f, "%lld,%.17g,%.17g,%lld,%.17g\n", static_cast<long long>(s.site_id), s.lon,
                   s.lat, static_cast<long long>(t), d.values(i, t));
  }
  std::fclose(f);
}

}  // namespace exlgm
