#include "exlgm/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "exlgm/errors.hpp"

namespace exlgm {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_write(const std::string& path) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw invalid_input("cannot open for writing: " + path);
  return f;
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

double to_double(const std::string& s, const std::string& path, std::size_t line) {
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw invalid_input(path + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_fits_csv(const std::vector<SiteFit>& fits, const std::string& path) {
  File f = open_write(path);
  std::fputs(
      "site_id,lon,lat,threshold,n_exceedances,psi_hat,tau_hat,phi_hat,q11,q12,q13,q22,q23,q33\n",
      f.get());
  for (const auto& s : fits)
    std::fprintf(f.get(), "%lld,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 static_cast<long long>(s.site_id), s.lon, s.lat, s.threshold, s.n_exceedances,
                 s.eta_hat.psi, s.eta_hat.tau, s.eta_hat.phi, s.info(0, 0), s.info(0, 1),
                 s.info(0, 2), s.info(1, 1), s.info(1, 2), s.info(2, 2));
}

std::vector<SiteFit> read_fits_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open fit table: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw invalid_input(path + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line !=
      "site_id,lon,lat,threshold,n_exceedances,psi_hat,tau_hat,phi_hat,q11,q12,q13,q22,q23,q33")
    throw invalid_input(path + ": unexpected fit table header");
  std::vector<SiteFit> fits;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto v = split_csv(line);
    if (v.size() != 14)
      throw invalid_input(path + ":" + std::to_string(line_no) + ": expected 14 fields");
    SiteFit s;
    s.site_id = static_cast<std::int64_t>(to_double(v[0], path, line_no));
    s.lon = to_double(v[1], path, line_no);
    s.lat = to_double(v[2], path, line_no);
    s.threshold = to_double(v[3], path, line_no);
    s.n_exceedances = static_cast<int>(to_double(v[4], path, line_no));
    s.eta_hat = {to_double(v[5], path, line_no), to_double(v[6], path, line_no),
                 to_double(v[7], path, line_no)};
    const double q11 = to_double(v[8], path, line_no), q12 = to_double(v[9], path, line_no),
                 q13 = to_double(v[10], path, line_no), q22 = to_double(v[11], path, line_no),
                 q23 = to_double(v[12], path, line_no), q33 = to_double(v[13], path, line_no);
    s.info << q11, q12, q13, q12, q22, q23, q13, q23, q33;
    fits.push_back(s);
  }
  if (fits.empty()) throw invalid_input(path + ": no fit rows");
  return fits;
}

void write_exclusions_csv(const std::vector<SiteExclusion>& exclusions, const std::string& path) {
  File f = open_write(path);
  std::fputs("site_id,reason\n", f.get());
  for (const auto& e : exclusions) {
    std::string reason = e.reason;
    for (char& c : reason)
      if (c == ',' || c == '\n') c = ';';
    std::fprintf(f.get(), "%lld,%s\n", static_cast<long long>(e.site_id), reason.c_str());
  }
}

std::vector<SiteExclusion> read_exclusions_csv(const std::string& path) {
  std::vector<SiteExclusion> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto pos = line.find(',');
    if (pos == std::string::npos) continue;
    out.push_back({std::stoll(line.substr(0, pos)), line.substr(pos + 1)});
  }
  return out;
}

void write_theta_csv(const PosteriorSamples& samples, const std::string& path) {
  File f = open_write(path);
  std::fputs("sigma_psi,s_psi,rho_psi,sigma_tau,s_tau,rho_tau,sigma_phi\n", f.get());
  for (Eigen::Index r = 0; r < samples.theta_draws.rows(); ++r) {
    for (int k = 0; k < 7; ++k)
      std::fprintf(f.get(), "%s%.17g", k ? "," : "", samples.theta_draws(r, k));
    std::fputc('\n', f.get());
  }
}

namespace {
constexpr char kLatentMagic[8] = {'E', 'X', 'L', 'G', 'M', 'L', 'D', '1'};
}

void write_latent_bin(const PosteriorSamples& samples, const std::string& path) {
  File f = open_write(path);
  std::fwrite(kLatentMagic, 1, 8, f.get());
  const std::int64_t rows = samples.latent_draws.rows();
  const std::int64_t cols = samples.latent_draws.cols();
  std::fwrite(&rows, sizeof rows, 1, f.get());
  std::fwrite(&cols, sizeof cols, 1, f.get());
  for (std::int64_t r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = samples.latent_draws.row(r);
    std::fwrite(row.data(), sizeof(double), static_cast<std::size_t>(cols), f.get());
  }
}

PosteriorSamples read_posterior(const std::string& theta_csv, const std::string& latent_bin,
                                int n_sites, int n_mesh_nodes) {
  PosteriorSamples out;
  out.n_sites = n_sites;
  out.n_mesh_nodes = n_mesh_nodes;

  {
    std::ifstream in(theta_csv, std::ios::binary);
    if (!in) throw invalid_input("cannot open theta draws: " + theta_csv);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw invalid_input(theta_csv + ": empty file");
    ++line_no;
    std::vector<std::array<double, 7>> rows;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto v = split_csv(line);
      if (v.size() != 7)
        throw invalid_input(theta_csv + ":" + std::to_string(line_no) + ": expected 7 fields");
      std::array<double, 7> a;
      for (int k = 0; k < 7; ++k)
        a[static_cast<std::size_t>(k)] = to_double(v[static_cast<std::size_t>(k)], theta_csv, line_no);
      rows.push_back(a);
    }
    out.theta_draws.resize(static_cast<Eigen::Index>(rows.size()), 7);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int k = 0; k < 7; ++k)
        out.theta_draws(static_cast<Eigen::Index>(r), k) = rows[r][static_cast<std::size_t>(k)];
  }

  std::ifstream in(latent_bin, std::ios::binary);
  if (!in) throw invalid_input("cannot open latent draws: " + latent_bin);
  char magic[8];
  std::int64_t rows = 0, cols = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kLatentMagic, 8) != 0)
    throw invalid_input(latent_bin + ": not a latent draw file");
  const std::int64_t expect_cols = 3LL * n_sites + 3 + 2LL * n_mesh_nodes;
  if (cols != expect_cols)
    throw invalid_input(latent_bin + ": latent dimension " + std::to_string(cols) +
                        " does not match the model (" + std::to_string(expect_cols) + ")");
  if (rows != out.theta_draws.rows())
    throw invalid_input(latent_bin + ": draw count differs from the theta file");
  out.latent_draws.resize(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r) {
    Eigen::VectorXd row(cols);
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(sizeof(double) * cols));
    if (!in) throw invalid_input(latent_bin + ": truncated file");
    out.latent_draws.row(r) = row;
  }
  return out;
}

void write_return_levels_csv(const std::vector<ReturnLevelRow>& rows, const std::string& path) {
  File f = open_write(path);
  std::fputs("site_id,lon,lat,M,mean,sd,q025,q975\n", f.get());
  for (const auto& r : rows)
    std::fprintf(f.get(), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 static_cast<long long>(r.site_id), r.lon, r.lat, r.return_period, r.mean, r.sd,
                 r.q025, r.q975);
}

void write_variogram_csv(const std::vector<VariogramBin>& bins, const std::string& path) {
  File f = open_write(path);
  std::fputs("bin_center,semivariance,count\n", f.get());
  for (const auto& b : bins)
    std::fprintf(f.get(), "%.17g,%.17g,%lld\n", b.center, b.semivariance,
                 static_cast<long long>(b.pair_count));
}

void write_predictive_csv(const std::vector<double>& draws, const std::string& path) {
  File f = open_write(path);
  std::fputs("draw,value\n", f.get());
  for (std::size_t i = 0; i < draws.size(); ++i)
    std::fprintf(f.get(), "%zu,%.17g\n", i, draws[i]);
}

void write_mesh_csv(const LatticeMesh& mesh, const std::string& path) {
  File f = open_write(path);
  std::fputs("node_id,x,y\n", f.get());
  for (int k = 0; k < mesh.node_count(); ++k) {
    const auto p = mesh.node(k);
    std::fprintf(f.get(), "%d,%.17g,%.17g\n", k, p.x(), p.y());
  }
}

}  // namespace exlgm
