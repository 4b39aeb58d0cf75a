// lorentz: figure-data generator for the random Lorentz gas resonance toolkit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "lorentz/bounds.hpp"
#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/fields.hpp"
#include "lorentz/log.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/rmtstats.hpp"
#include "lorentz/twoscat.hpp"

#ifndef LORENTZ_VERSION
#define LORENTZ_VERSION "dev"
#endif

namespace fs = std::filesystem;
using lorentz::cplx;
using lorentz::format_double;

namespace {

enum Exit { kOk = 0, kConfigError = 1, kNumericalError = 2, kPartial = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_file;
  int d = 3;
  int n = 100;
  double sigma = 1.0;
  std::string model = "hard_sphere";
  double pole_re = 10.0;
  double pole_im = -0.5;
  double alpha = 0.1;
  std::uint64_t seed = 1;
  int configs = 32;
  std::string grid = "9.75:10.25:21,-0.5:0.02:27";
  std::string out = ".";
  int threads = 0;
  double max_failed = 0.1;
  std::string log_level = "warning";
  // cross-section
  double k_min = 0.01, k_max = 2.0;
  int points = 400;
  // two-scatterer
  double s = 1.0;
  int n_min = 1, n_max = 10;
  std::string dims = "1,2,3";
  // eigencloud, cut, avg-green
  double k = 10.0;
  double slope_lo = 0.0, slope_hi = 0.0;
  double re_k = 10.0;
  std::string log_cut;
  double band = 0.0;
  double radius = 1.0;
  double im_k = 0.0;
  long pairs = 0;
};

// Keys accepted in the config file for each subcommand, in flag spelling.
void add_common(CLI::App* app, Options& o) {
  app->option_defaults()->always_capture_default();
  app->add_option("--config", o.config_file, "flat key = value file; flags override its keys");
  app->add_option("--d", o.d, "dimension")->check(CLI::Range(1, 5));
  app->add_option("--N", o.n, "scatterers")->check(CLI::PositiveNumber);
  app->add_option("--sigma", o.sigma, "mean spacing")->check(CLI::PositiveNumber);
  app->add_option("--model", o.model, "resonant | hard_sphere")->check(CLI::IsMember({"resonant", "hard_sphere"}));
  app->add_option("--pole-re", o.pole_re, "resonant model: Re p");
  app->add_option("--pole-im", o.pole_im, "resonant model: Im p (< 0)");
  app->add_option("--alpha", o.alpha, "hard-sphere scattering length")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--configs", o.configs, "ensemble size")->check(CLI::PositiveNumber);
  app->add_option("--grid", o.grid, "re_min:re_max:nx,im_min:im_max:ny");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--threads", o.threads, "worker threads (default LORENTZ_THREADS or all cores)");
  app->add_option("--max-failed", o.max_failed, "failed-cell fraction above which the exit code is 3");
  app->add_option("--log-level", o.log_level, "quiet | warning | info")->check(CLI::IsMember({"quiet", "warning", "info"}));
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string x) {
    const auto a = x.find_first_not_of(" \t\r");
    const auto b = x.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// Fills options not given on the command line from the config file.
void apply_config_file(CLI::App* sub, const Options& o) {
  if (o.config_file.empty()) return;
  for (const auto& [key, value] : read_config_file(o.config_file)) {
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw ConfigError("unknown config key '" + key + "' for " + sub->get_name());
    }
    if (opt->count() > 0 || key == "config") continue;
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

lorentz::ScatteringModel make_model(const Options& o) {
  if (o.model == "resonant") {
    if (!(o.pole_im < 0.0)) throw ConfigError("pole-im must be negative");
    return lorentz::ScatteringModel::resonant(cplx(o.pole_re, o.pole_im));
  }
  return lorentz::ScatteringModel::hard_sphere(o.alpha);
}

lorentz::ComplexGrid parse_grid(const std::string& text) {
  double r0, r1, i0, i1;
  int nx, ny;
  char c1, c2, c3, c4, c5;
  std::istringstream in(text);
  if (!(in >> r0 >> c1 >> r1 >> c2 >> nx >> c3 >> i0 >> c4 >> i1 >> c5 >> ny) || c1 != ':' || c2 != ':' || c3 != ',' ||
      c4 != ':' || c5 != ':')
    throw ConfigError("grid must look like re_min:re_max:nx,im_min:im_max:ny");
  try {
    return lorentz::ComplexGrid(r0, r1, nx, i0, i1, ny);
  } catch (const lorentz::DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> parse_log_range(const std::string& text) {
  double a, b;
  int n;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !(a > 0.0 && b > a) || n < 2)
    throw ConfigError("log-cut must look like lo:hi:n with 0 < lo < hi (|Im k| values)");
  std::vector<double> out;
  for (int t = 0; t < n; ++t) out.push_back(-a * std::pow(b / a, double(t) / (n - 1)));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad integer list: " + text);
    }
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<char> buf(1 << 16);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), in.gcount());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

// Output files plus the provenance block shared by all of them.
class Run {
public:
  Run(std::string subcommand, const Options& o, const CLI::App* sub) : subcommand_(std::move(subcommand)), dir_(o.out) {
    provenance_.emplace_back("tool", "lorentz");
    provenance_.emplace_back("version", LORENTZ_VERSION);
    provenance_.emplace_back("subcommand", subcommand_);
    // Echo every resolved option except paths and thread counts, which do not affect values.
    for (const CLI::Option* opt : sub->get_options()) {
      const std::string name = opt->get_name();
      if (name.rfind("--", 0) != 0 || name == "--help" || name == "--config" || name == "--out" ||
          name == "--threads" || name == "--log-level")
        continue;
      const std::string value = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
      provenance_.emplace_back("config." + name.substr(2), value);
    }
    fs::create_directories(dir_);
  }

  const lorentz::Metadata& provenance() const { return provenance_; }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return f;
  }

  void header(std::ostream& out) const {
    for (const auto& [k, v] : provenance_) out << "# " << k << '=' << v << '\n';
  }

  void write_field(const std::string& name, lorentz::ScalarField field) {
    lorentz::Metadata meta = provenance_;
    for (auto& kv : field.meta) meta.push_back(kv);
    field.meta = std::move(meta);
    auto f = open(name);
    lorentz::write_field_csv(f, field);
  }

  void finish() {
    std::ofstream m(dir_ / "manifest.txt", std::ios::binary);
    m << "# tool=lorentz version=" << LORENTZ_VERSION << " subcommand=" << subcommand_ << '\n';
    for (const auto& name : files_) m << sha256_file(dir_ / name) << "  " << name << '\n';
  }

private:
  std::string subcommand_;
  fs::path dir_;
  lorentz::Metadata provenance_;
  std::vector<std::string> files_;
};

void warn_validity(const lorentz::ScatteringModel& model, double k_max) {
  if (model.is_hard_sphere() && k_max * model.as_hard_sphere().alpha > 1.0) {
    std::ostringstream msg;
    msg << "hard-sphere model used at k alpha = " << k_max * model.as_hard_sphere().alpha
        << " > 1, outside its physical validity window";
    lorentz::log::warn(msg.str());
  }
}

int run_cross_section(const Options& o, Run& run) {
  const auto res = lorentz::ScatteringModel::resonant(cplx(o.pole_re, o.pole_im));
  const auto hs = lorentz::ScatteringModel::hard_sphere(o.alpha);
  if (!(o.k_min > 0.0 && o.k_max > o.k_min) || o.points < 2) throw ConfigError("need 0 < k-min < k-max, points >= 2");
  auto f = run.open("cross_section.csv");
  run.header(f);
  f << "k,sigma_max,sigma_pt_resonant,sigma_pt_hard_sphere\n";
  for (int t = 0; t < o.points; ++t) {
    const double k = o.k_min + (o.k_max - o.k_min) * t / (o.points - 1);
    const auto cr = lorentz::cross_section(res, o.d, k);
    double hs_pt;
    try {
      hs_pt = lorentz::cross_section(hs, o.d, k).sigma_pt;
    } catch (const lorentz::PoleError&) {
      hs_pt = 0.0;  // amplitude zero
    }
    f << format_double(k) << ',' << format_double(cr.sigma_max) << ',' << format_double(cr.sigma_pt) << ','
      << format_double(hs_pt) << '\n';
  }
  return kOk;
}

int run_two_scatterer(const Options& o, Run& run) {
  if (!(o.s > 0.0)) throw ConfigError("s must be positive");
  if (o.n_min < 1 || o.n_max < o.n_min) throw ConfigError("need 1 <= n-min <= n-max");
  const auto model = make_model(o);
  auto f = run.open("two_scatterer.csv");
  run.header(f);
  f << "d,n,method,parity,re_ks,im_ks,residual,converged\n";
  bool all = true;
  for (int d : parse_int_list(o.dims)) {
    if (d < 1 || d > 5) throw ConfigError("dims must lie in 1..5");
    for (const auto& b : lorentz::exact_resonances(d, model, o.s, o.n_min, o.n_max)) {
      all = all && b.converged;
      f << d << ',' << b.n << ",exact," << lorentz::to_string(b.parity) << ',' << format_double(b.k.real() * o.s) << ','
        << format_double(b.k.imag() * o.s) << ',' << format_double(b.residual) << ',' << int(b.converged) << '\n';
    }
    for (int n = o.n_min; n <= o.n_max; ++n) {
      const std::pair<lorentz::ApproxVariant, const char*> variants[] = {
          {lorentz::ApproxVariant::general, "approx_general"}, {lorentz::ApproxVariant::hard_sphere, "approx_hs"}};
      for (auto [variant, name] : variants) {
        if (variant == lorentz::ApproxVariant::hard_sphere && !model.is_hard_sphere()) continue;
        cplx k;
        try {
          k = lorentz::approx_resonance(d, model, o.s, n, variant);
        } catch (const lorentz::DomainError&) {
          k = cplx(NAN, NAN);
        }
        f << d << ',' << n << ',' << name << ",," << format_double(k.real() * o.s) << ','
          << format_double(k.imag() * o.s) << ",,\n";
      }
    }
  }
  return all ? kOk : kPartial;
}

int run_eigencloud(const Options& o, Run& run) {
  const lorentz::GasGeometry geom(o.d, o.n, o.sigma);
  const auto cloud = lorentz::collect_cloud(geom, o.k, o.configs, o.seed, o.threads);
  {
    auto f = run.open("cloud.csv");
    run.header(f);
    lorentz::write_cloud_csv(f, cloud);
  }
  const auto st = lorentz::cloud_stats(cloud.samples);
  lorentz::Metadata report = run.provenance();
  auto add = [&](const std::string& k, const std::string& v) { report.emplace_back(k, v); };
  add("samples", std::to_string(st.count));
  add("failed_configs", std::to_string(cloud.failed_configs));
  add("mean_re", format_double(st.mean.real()));
  add("mean_im", format_double(st.mean.imag()));
  add("se_re", format_double(st.se_re));
  add("se_im", format_double(st.se_im));
  add("min_im", format_double(st.min_im));
  add("radius", format_double(st.radius));
  add("radius_estimate", format_double(lorentz::cloud_radius_estimate(geom, o.k)));
  std::vector<double> ims;
  for (const cplx& z : cloud.samples) ims.push_back(z.imag());
  try {
    const auto fit = lorentz::mp_fit(ims);
    add("mp_lambda_minus", format_double(fit.params.lambda_minus));
    add("mp_lambda_plus", format_double(fit.params.lambda_plus));
    add("mp_bins", std::to_string(fit.bins));
  } catch (const std::exception& e) {
    lorentz::log::warn(std::string("eigencloud: MP fit failed: ") + e.what());
    add("mp_fit", "failed");
  }
  if (o.slope_hi > o.slope_lo && o.slope_lo > 0.0) {
    add("marginal_slope_window", format_double(o.slope_lo) + ":" + format_double(o.slope_hi));
    try {
      add("marginal_slope", format_double(lorentz::marginal_slope(ims, o.slope_lo, o.slope_hi).slope));
    } catch (const lorentz::DomainError& e) {
      lorentz::log::warn(std::string("eigencloud: marginal slope skipped: ") + e.what());
      add("marginal_slope", "failed");
    }
  }
  {
    auto f = run.open("report.txt");
    lorentz::write_report(f, report);
  }
  std::vector<double> s_values;
  for (int t = 0; t <= 400; ++t) s_values.push_back(1e-3 * std::pow(1e4, t / 400.0) * o.sigma);
  auto f = run.open("spiral.csv");
  run.header(f);
  f << "s,re_nu_plus,im_nu_plus,re_nu_minus,im_nu_minus\n";
  for (const auto& p : lorentz::spiral_curves(o.d, o.k, s_values))
    f << format_double(p.s) << ',' << format_double(p.nu_plus.real()) << ',' << format_double(p.nu_plus.imag()) << ','
      << format_double(p.nu_minus.real()) << ',' << format_double(p.nu_minus.imag()) << '\n';
  return cloud.failed_configs > o.max_failed * o.configs ? kPartial : kOk;
}

int field_status(const lorentz::ScalarField& phi, double max_failed) {
  std::size_t failed = 0;
  for (auto m : phi.mask) failed += (m & lorentz::mask_bits::failed) != 0;
  return failed > max_failed * phi.mask.size() ? kPartial : kOk;
}

int run_density(const Options& o, Run& run) {
  const lorentz::GasGeometry geom(o.d, o.n, o.sigma);
  const auto model = make_model(o);
  const auto grid = parse_grid(o.grid);
  warn_validity(model, std::max(std::abs(grid.re_min()), std::abs(grid.re_max())));
  auto phi = lorentz::potential_map(geom, model, grid, o.configs, o.seed, o.threads);
  lorentz::annotate_validity(phi, lorentz::validity_bound(geom.radius()));
  const auto rho = lorentz::density_from_potential(phi);
  run.write_field("potential.csv", phi);
  run.write_field("density.csv", rho);
  return field_status(phi, o.max_failed);
}

int run_cut(const Options& o, Run& run) {
  const lorentz::GasGeometry geom(o.d, o.n, o.sigma);
  const auto model = make_model(o);
  warn_validity(model, std::abs(o.re_k));
  const double k_imax = lorentz::validity_bound(geom.radius());
  int status = kOk;
  std::vector<double> ims;
  std::vector<lorentz::BandPoint> density;
  std::vector<double> phi_mean, phi_se;
  if (!o.log_cut.empty()) {
    ims = parse_log_range(o.log_cut);
    lorentz::StencilCutOptions opt;
    opt.threads = o.threads;
    if (o.band > 0.0) opt.spread = o.band;
    density = lorentz::stencil_density_cut(geom, model, o.re_k, ims, o.configs, o.seed, opt);
    std::vector<cplx> pts;
    for (double y : ims) pts.emplace_back(o.re_k, y);
    const auto s = lorentz::sample_potential(geom, model, pts, o.configs, o.seed, o.threads);
    phi_mean = s.mean;
    phi_se = s.std_error;
  } else {
    const auto grid = parse_grid(o.grid);
    if (!(o.re_k > grid.re_min() && o.re_k < grid.re_max())) throw ConfigError("re-k must lie inside the grid");
    auto phi = lorentz::potential_map(geom, model, grid, o.configs, o.seed, o.threads);
    lorentz::annotate_validity(phi, k_imax);
    status = field_status(phi, o.max_failed);
    const auto rho = lorentz::density_from_potential(phi);
    const double half = o.band > 0.0 ? o.band : 0.5 * grid.h_re();
    density = lorentz::band_average_cut(rho, o.re_k - half, o.re_k + half);
    const auto pcut = lorentz::vertical_cut(phi, o.re_k);
    for (const auto& b : density) {
      ims.push_back(b.im_k);
      // Potential row of the density row (interior offset of one).
      const auto it = std::find_if(pcut.begin(), pcut.end(), [&](const auto& p) { return p.im_k == b.im_k; });
      phi_mean.push_back(it == pcut.end() ? NAN : it->value);
    }
    phi_se.assign(ims.size(), NAN);
    run.write_field("potential.csv", phi);
  }
  const auto diag = lorentz::band_diagnostics(model, geom, o.re_k, ims);
  auto f = run.open("cut.csv");
  run.header(f);
  f << "# k_imax=" << format_double(diag.k_imax) << "\n# k_idiff=" << format_double(diag.k_idiff)
    << "\n# mean_free_path=" << format_double(diag.mean_free_path) << '\n';
  f << "im_k,density,density_se,columns,potential,potential_se,bound,approx_density\n";
  for (std::size_t r = 0; r < ims.size(); ++r) {
    const double approx = ims[r] < 0.0 ? lorentz::width_density_approx(o.d, ims[r]) : NAN;
    f << format_double(ims[r]) << ',' << format_double(density[r].mean) << ',' << format_double(density[r].std_error)
      << ',' << density[r].columns << ',' << format_double(phi_mean[r]) << ',' << format_double(phi_se[r]) << ','
      << format_double(diag.bound_curve[r].value) << ',' << format_double(approx) << '\n';
  }
  return status;
}

int run_avg_green(const Options& o, Run& run) {
  if (!(o.radius > 0.0)) throw ConfigError("radius must be positive");
  const cplx k(o.k, o.im_k);
  auto f = run.open("avg_green.csv");
  run.header(f);
  f << "d,re_k,im_k,R,closed_real,quadrature,quadrature_exact,asymptotic_complex,monte_carlo,monte_carlo_se\n";
  for (int d : parse_int_list(o.dims)) {
    auto eval = [&](lorentz::AvgMode mode) {
      try {
        return lorentz::avg_green_sq(d, k, o.radius, mode);
      } catch (const lorentz::DomainError&) {
        return double(NAN);
      } catch (const lorentz::OverflowError&) {
        return double(NAN);
      }
    };
    double mc = NAN, mc_se = NAN;
    if (o.pairs > 1) {
      // Independent pairs of uniform points in the ball.
      const lorentz::GasGeometry unit(d, 2);
      double sum = 0.0, sum2 = 0.0;
      for (long p = 0; p < o.pairs; ++p) {
        const auto cfg = lorentz::sample_config(unit, lorentz::derive_seed(o.seed, p));
        const double r = cfg.distance(0, 1) * o.radius / unit.radius();
        const double g = std::norm(lorentz::green_plus(d, k, r));
        sum += g;
        sum2 += g * g;
      }
      mc = sum / o.pairs;
      mc_se = std::sqrt(std::max(0.0, sum2 / o.pairs - mc * mc) / (o.pairs - 1));
    }
    f << d << ',' << format_double(k.real()) << ',' << format_double(k.imag()) << ',' << format_double(o.radius) << ','
      << format_double(eval(lorentz::AvgMode::closed_real)) << ',' << format_double(eval(lorentz::AvgMode::quadrature))
      << ',' << format_double(eval(lorentz::AvgMode::quadrature_exact)) << ','
      << format_double(eval(lorentz::AvgMode::asymptotic_complex)) << ',' << format_double(mc) << ','
      << format_double(mc_se) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance statistics of the random Lorentz gas"};
  app.set_version_flag("--version", LORENTZ_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* cs = app.add_subcommand("cross-section", "single-scatterer cross sections of both models vs k");
  add_common(cs, o);
  cs->add_option("--k-min", o.k_min);
  cs->add_option("--k-max", o.k_max);
  cs->add_option("--points", o.points);

  auto* ts = app.add_subcommand("two-scatterer", "exact and approximate two-scatterer resonance bands");
  add_common(ts, o);
  ts->add_option("--s", o.s, "separation");
  ts->add_option("--n-min", o.n_min);
  ts->add_option("--n-max", o.n_max);
  ts->add_option("--dims", o.dims, "comma-separated dimensions");

  auto* ec = app.add_subcommand("eigencloud", "eigenvalues of N(k), MP fit and radius report");
  add_common(ec, o);
  ec->add_option("--k", o.k, "real wavenumber");
  ec->add_option("--slope-lo", o.slope_lo, "marginal-slope window lower Im nu");
  ec->add_option("--slope-hi", o.slope_hi, "marginal-slope window upper Im nu");

  auto* de = app.add_subcommand("density", "resonance potential and density on a grid");
  add_common(de, o);

  auto* cu = app.add_subcommand("cut", "vertical density cut with bound and markers");
  add_common(cu, o);
  cu->add_option("--re-k", o.re_k, "Re k of the cut");
  cu->add_option("--log-cut", o.log_cut, "lo:hi:n log-spaced |Im k| with scaled stencils instead of a grid");
  cu->add_option("--band", o.band, "half-width in Re k averaged around the cut");

  auto* ag = app.add_subcommand("avg-green", "pair-averaged |G+|^2 by every method");
  add_common(ag, o);
  ag->add_option("--k", o.k, "Re k");
  ag->add_option("--im-k", o.im_k, "Im k");
  ag->add_option("--radius", o.radius, "ball radius R");
  ag->add_option("--dims", o.dims, "comma-separated dimensions");
  ag->add_option("--pairs", o.pairs, "Monte Carlo pairs (0 = skip)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    apply_config_file(sub, o);
    lorentz::log::set_level(o.log_level == "quiet" ? lorentz::log::Level::quiet
                            : o.log_level == "info" ? lorentz::log::Level::info
                                                    : lorentz::log::Level::warning);
    if (o.threads <= 0) o.threads = lorentz::default_thread_count();
    make_model(o);
    lorentz::GasGeometry(o.d, o.n, o.sigma);
  } catch (const ConfigError& e) {
    std::cerr << "lorentz: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "lorentz: config error: " << e.what() << '\n';
    return kConfigError;
  }

  const std::string name = sub->get_name();
  try {
    Run run(name, o, sub);
    int status = kOk;
    if (name == "cross-section") status = run_cross_section(o, run);
    else if (name == "two-scatterer") status = run_two_scatterer(o, run);
    else if (name == "eigencloud") status = run_eigencloud(o, run);
    else if (name == "density") status = run_density(o, run);
    else if (name == "cut") status = run_cut(o, run);
    else if (name == "avg-green") status = run_avg_green(o, run);
    run.finish();
    if (status == kPartial) std::cerr << "lorentz: partial result (failures above threshold)\n";
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "lorentz: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const lorentz::DomainError& e) {
    std::cerr << "lorentz: domain error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const lorentz::PoleError& e) {
    std::cerr << "lorentz: domain error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const lorentz::OverflowError& e) {
    std::cerr << "lorentz: overflow: " << e.what() << '\n';
    return kNumericalError;
  } catch (const lorentz::ConvergenceError& e) {
    std::cerr << "lorentz: no convergence: " << e.what() << '\n';
    return kNumericalError;
  } catch (const lorentz::SingularMatrixError& e) {
    std::cerr << "lorentz: singular matrix: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "lorentz: " << e.what() << '\n';
    return kConfigError;
  }
}
