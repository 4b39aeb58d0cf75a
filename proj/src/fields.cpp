#include "lorentz/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lorentz/ensemble.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/log.hpp"
#include "lorentz/parallel.hpp"

namespace lorentz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Configurations held in memory at once; the reduction runs in config order.
constexpr int kConfigBlock = 64;

// Welford accumulation in a fixed order.
struct Accumulator {
  int count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  double std_error() const { return count > 1 ? std::sqrt(m2 / (count - 1) / count) : kNaN; }
};

double phi_one(const ScattererConfig& config, const ScatteringModel& model, cplx k) {
  const LogAbsDet ld = log_abs_det(build_matrix(MatrixKind::M, config, model, k));
  if (ld.singular) throw SingularMatrixError("potential: det M(k) = 0");
  return ld.value / config.size();
}

}  // namespace

ComplexGrid::ComplexGrid(double re_min, double re_max, int nx, double im_min, double im_max, int ny)
    : re_min_(re_min), re_max_(re_max), im_min_(im_min), im_max_(im_max), nx_(nx), ny_(ny) {
  if (nx < 3 || ny < 3) throw DomainError("ComplexGrid: nx and ny must be >= 3");
  if (!(re_min < re_max) || !(im_min < im_max)) throw DomainError("ComplexGrid: bounds must be ordered");
  h_re_ = (re_max - re_min) / (nx - 1);
  h_im_ = (im_max - im_min) / (ny - 1);
}

ComplexGrid::ComplexGrid(double re_min, double re_max, int nx, double im_min, double im_max, int ny, double h_re,
                         double h_im)
    : re_min_(re_min), re_max_(re_max), im_min_(im_min), im_max_(im_max), nx_(nx), ny_(ny), h_re_(h_re), h_im_(h_im) {}

ComplexGrid ComplexGrid::with_spacing(double re_min, double re_max, int nx, double im_min, double im_max, int ny,
                                      double h_re, double h_im) {
  if (nx < 1 || ny < 1 || !(h_re > 0.0) || !(h_im > 0.0) || !(re_min <= re_max) || !(im_min <= im_max))
    throw DomainError("ComplexGrid: invalid explicit grid");
  return ComplexGrid(re_min, re_max, nx, im_min, im_max, ny, h_re, h_im);
}

ComplexGrid ComplexGrid::interior() const {
  return ComplexGrid(re(1), re(nx_ - 2), nx_ - 2, im(1), im(ny_ - 2), ny_ - 2, h_re_, h_im_);
}

const char* to_string(FieldKind kind) { return kind == FieldKind::potential ? "potential" : "density"; }

std::string ScalarField::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return {};
}

PotentialSample sample_potential(const GasGeometry& geom, const ScatteringModel& model, const std::vector<cplx>& points,
                                 int n_configs, std::uint64_t master_seed, int threads) {
  if (n_configs < 1) throw DomainError("sample_potential: n_configs must be >= 1");
  if (threads <= 0) threads = default_thread_count();
  const std::size_t np = points.size();
  std::vector<Accumulator> acc(np);
  std::vector<int> failures(np, 0);
  std::vector<double> block(static_cast<std::size_t>(kConfigBlock) * np);
  for (int c0 = 0; c0 < n_configs; c0 += kConfigBlock) {
    const int nb = std::min(kConfigBlock, n_configs - c0);
    parallel_for(static_cast<std::size_t>(nb), threads, [&](std::size_t b) {
      const ScattererConfig config = sample_config(geom, derive_seed(master_seed, c0 + b));
      double* row = block.data() + b * np;
      for (std::size_t p = 0; p < np; ++p) {
        try {
          row[p] = phi_one(config, model, points[p]);
        } catch (const std::exception&) {
          row[p] = kNaN;
        }
      }
    });
    for (int b = 0; b < nb; ++b) {
      const double* row = block.data() + static_cast<std::size_t>(b) * np;
      for (std::size_t p = 0; p < np; ++p) {
        if (std::isfinite(row[p])) acc[p].add(row[p]);
        else ++failures[p];
      }
    }
  }
  PotentialSample out;
  out.mean.resize(np);
  out.std_error.resize(np);
  out.failures = std::move(failures);
  for (std::size_t p = 0; p < np; ++p) {
    out.mean[p] = acc[p].count ? acc[p].mean : kNaN;
    out.std_error[p] = acc[p].std_error();
  }
  return out;
}

bool near_domain_boundary(int d, const ScatteringModel& model, cplx k, double window_re, double window_im) {
  if (std::abs(k.real()) < window_re && std::abs(k.imag()) < window_im) return true;
  if (d % 2 == 0 && std::abs(k.real()) < window_re && k.imag() < window_im) return true;
  if (model.is_hard_sphere() && std::abs(k.imag()) < window_im) {
    const double x = std::abs(k.real());
    for (double z : amplitude_zeros(model, d, std::max(0.0, x - window_re), x + window_re))
      if (std::abs(x - z) < window_re) return true;
  }
  return false;
}

ScalarField potential_map(const GasGeometry& geom, const ScatteringModel& model, const ComplexGrid& grid, int n_configs,
                          std::uint64_t master_seed, int threads) {
  const int d = geom.dimension();
  ScalarField out{grid, FieldKind::potential, n_configs, {}, {}, {}, {}};
  out.values.assign(grid.cells(), kNaN);
  out.std_error.assign(grid.cells(), kNaN);
  out.mask.assign(grid.cells(), 0);
  std::vector<cplx> points;
  std::vector<std::size_t> where;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const cplx k = grid.at(i, j);
      if (near_domain_boundary(d, model, k, grid.h_re(), grid.h_im())) {
        out.mask[grid.index(i, j)] |= mask_bits::domain;
      } else {
        points.push_back(k);
        where.push_back(grid.index(i, j));
      }
    }
  }
  const PotentialSample s = sample_potential(geom, model, points, n_configs, master_seed, threads);
  long failed_cells = 0, failed_evals = 0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    out.values[where[p]] = s.mean[p];
    out.std_error[where[p]] = s.std_error[p];
    if (s.failures[p] > 0) {
      out.mask[where[p]] |= mask_bits::failed;
      ++failed_cells;
      failed_evals += s.failures[p];
    }
  }
  if (failed_cells > 0) {
    std::ostringstream msg;
    msg << "potential_map: " << failed_evals << " evaluations failed in " << failed_cells << " cells (masked)";
    log::warn(msg.str());
  }
  out.meta = {{"kind", "potential"},
              {"d", std::to_string(d)},
              {"N", std::to_string(geom.size())},
              {"sigma", format_double(geom.sigma())},
              {"R", format_double(geom.radius())},
              {"model", model.describe()},
              {"master_seed", std::to_string(master_seed)},
              {"failed_cells", std::to_string(failed_cells)},
              {"failed_evaluations", std::to_string(failed_evals)}};
  return out;
}

ScalarField density_from_potential(const ScalarField& potential) {
  if (potential.kind != FieldKind::potential) throw DomainError("density_from_potential: field is not a potential");
  const ComplexGrid& g = potential.grid;
  const ComplexGrid inner = g.interior();
  ScalarField out{inner, FieldKind::density, potential.n_configs, {}, {}, {}, potential.meta};
  out.values.assign(inner.cells(), kNaN);
  out.mask.assign(inner.cells(), 0);
  const double hx2 = g.h_re() * g.h_re(), hy2 = g.h_im() * g.h_im();
  long negative = 0;
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const std::size_t o = inner.index(i - 1, j - 1);
      std::uint8_t bits = 0;
      for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        bits |= potential.flags(i + di, j + dj) & mask_bits::excluded;
      bits |= potential.flags(i, j) & mask_bits::below_kimax;
      if (!(bits & mask_bits::excluded)) {
        const double c = potential.value(i, j);
        const double v = (potential.value(i + 1, j) + potential.value(i - 1, j) - 2.0 * c) / hx2 +
                         (potential.value(i, j + 1) + potential.value(i, j - 1) - 2.0 * c) / hy2;
        out.values[o] = v;
        if (v < 0.0) {
          bits |= mask_bits::negative;
          ++negative;
        }
      }
      out.mask[o] = bits;
    }
  }
  for (auto& [k, v] : out.meta)
    if (k == "kind") v = "density";
  out.meta.emplace_back("negative_cells", std::to_string(negative));
  return out;
}

std::vector<CutPoint> vertical_cut(const ScalarField& field, double re_k) {
  const ComplexGrid& g = field.grid;
  if (!(re_k >= g.re_min() && re_k <= g.re_max())) throw DomainError("vertical_cut: re_k outside the grid");
  const double t = (re_k - g.re_min()) / g.h_re();
  int i0 = std::min(static_cast<int>(std::floor(t)), g.nx() - 1);
  double w = t - i0;
  if (std::abs(w) < 1e-9) w = 0.0;
  if (std::abs(w - 1.0) < 1e-9) {
    ++i0;
    w = 0.0;
  }
  std::vector<CutPoint> out;
  out.reserve(g.ny());
  for (int j = 0; j < g.ny(); ++j) {
    CutPoint p{g.im(j), field.value(i0, j), field.flags(i0, j)};
    if (w > 0.0) {
      p.value = (1.0 - w) * p.value + w * field.value(i0 + 1, j);
      p.mask |= field.flags(i0 + 1, j);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<BandPoint> band_average_cut(const ScalarField& field, double re_lo, double re_hi) {
  const ComplexGrid& g = field.grid;
  std::vector<BandPoint> out;
  for (int j = 0; j < g.ny(); ++j) {
    Accumulator acc;
    for (int i = 0; i < g.nx(); ++i)
      if (g.re(i) >= re_lo && g.re(i) <= re_hi && field.usable(i, j)) acc.add(field.value(i, j));
    out.push_back({g.im(j), acc.count ? acc.mean : kNaN, acc.std_error(), acc.count});
  }
  return out;
}

std::vector<BandPoint> stencil_density_cut(const GasGeometry& geom, const ScatteringModel& model, double re_k,
                                           const std::vector<double>& im_values, int n_configs,
                                           std::uint64_t master_seed, const StencilCutOptions& options) {
  if (options.columns < 1 || !(options.relative_step > 0.0)) throw DomainError("stencil_density_cut: bad options");
  std::vector<cplx> points;
  std::vector<double> steps;
  for (double y : im_values) {
    if (y == 0.0) throw DomainError("stencil_density_cut: Im k = 0 has no stencil scale");
    const double h = options.relative_step * std::abs(y);
    steps.push_back(h);
    for (int c = 0; c < options.columns; ++c) {
      const double x =
          options.columns == 1 ? re_k : re_k + options.spread * (2.0 * c / (options.columns - 1) - 1.0);
      for (cplx offset : {cplx(0, 0), cplx(h, 0), cplx(-h, 0), cplx(0, h), cplx(0, -h)}) points.push_back(cplx(x, y) + offset);
    }
  }
  const PotentialSample s = sample_potential(geom, model, points, n_configs, master_seed, options.threads);
  std::vector<BandPoint> out;
  std::size_t p = 0;
  for (std::size_t r = 0; r < im_values.size(); ++r) {
    const double h2 = steps[r] * steps[r];
    Accumulator acc;
    for (int c = 0; c < options.columns; ++c, p += 5) {
      bool ok = true;
      for (int q = 0; q < 5; ++q) ok = ok && s.failures[p + q] == 0;
      if (!ok) continue;
      acc.add((s.mean[p + 1] + s.mean[p + 2] + s.mean[p + 3] + s.mean[p + 4] - 4.0 * s.mean[p]) / h2);
    }
    out.push_back({im_values[r], acc.count ? acc.mean : kNaN, acc.std_error(), acc.count});
  }
  return out;
}

void annotate_validity(ScalarField& field, double k_imax) {
  for (int j = 0; j < field.grid.ny(); ++j)
    if (field.grid.im(j) < -k_imax)
      for (int i = 0; i < field.grid.nx(); ++i) field.mask[field.grid.index(i, j)] |= mask_bits::below_kimax;
  for (auto& [k, v] : field.meta)
    if (k == "k_imax") {
      v = format_double(k_imax);
      return;
    }
  field.meta.emplace_back("k_imax", format_double(k_imax));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return kNaN;
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw DomainError("parse_double: not a number: '" + text + "'");
  return x;
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
  const ComplexGrid& g = field.grid;
  out << "# kind=" << to_string(field.kind) << '\n';
  out << "# re_min=" << format_double(g.re_min()) << "\n# re_max=" << format_double(g.re_max())
      << "\n# nx=" << g.nx() << "\n# im_min=" << format_double(g.im_min())
      << "\n# im_max=" << format_double(g.im_max()) << "\n# ny=" << g.ny() << "\n# h_re=" << format_double(g.h_re())
      << "\n# h_im=" << format_double(g.h_im()) << "\n# n_configs=" << field.n_configs
      << "\n# mask_encoding=" << mask_bits::kEncoding << '\n';
  for (const auto& [k, v] : field.meta)
    if (k != "kind") out << "# " << k << '=' << v << '\n';
  out << "re_k,im_k,value,mask_flag\n";
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      out << format_double(g.re(i)) << ',' << format_double(g.im(j)) << ',' << format_double(field.value(i, j)) << ','
          << static_cast<int>(field.flags(i, j)) << '\n';
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_csv(f, field);
  if (!f) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field_csv(std::istream& in) {
  Metadata header;
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
  }
  auto get = [&](const std::string& key) {
    for (const auto& [k, v] : header)
      if (k == key) return v;
    throw DomainError("read_field_csv: missing header key " + key);
  };
  const int nx = std::stoi(get("nx")), ny = std::stoi(get("ny"));
  const FieldKind kind = get("kind") == "density" ? FieldKind::density : FieldKind::potential;
  const double re_min = parse_double(get("re_min")), re_max = parse_double(get("re_max"));
  const double im_min = parse_double(get("im_min")), im_max = parse_double(get("im_max"));
  const ComplexGrid grid = ComplexGrid::with_spacing(re_min, re_max, nx, im_min, im_max, ny,
                                                     parse_double(get("h_re")), parse_double(get("h_im")));
  ScalarField out{grid, kind, std::stoi(get("n_configs")), {}, {}, {}, {}};
  out.values.assign(grid.cells(), kNaN);
  out.mask.assign(grid.cells(), 0);
  for (const auto& [k, v] : header) {
    static const char* skip[] = {"re_min", "re_max", "nx", "im_min", "im_max", "ny", "h_re", "h_im", "n_configs",
                                 "mask_encoding"};
    if (std::find(std::begin(skip), std::end(skip), k) == std::end(skip)) out.meta.emplace_back(k, v);
  }
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string re, im, value, flag;
    std::getline(row, re, ',');
    std::getline(row, im, ',');
    std::getline(row, value, ',');
    std::getline(row, flag, ',');
    if (rows >= grid.cells()) throw DomainError("read_field_csv: too many rows");
    const int i = static_cast<int>(rows % nx), j = static_cast<int>(rows / nx);
    if (parse_double(re) != grid.re(i) || parse_double(im) != grid.im(j))
      throw DomainError("read_field_csv: row " + std::to_string(rows) + " is off the grid");
    out.values[rows] = parse_double(value);
    out.mask[rows] = static_cast<std::uint8_t>(std::stoi(flag));
    ++rows;
  }
  if (rows != grid.cells()) throw DomainError("read_field_csv: expected " + std::to_string(grid.cells()) + " rows");
  return out;
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_field_csv(f);
}

}  // namespace lorentz
