#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/models.hpp"

namespace lorentz {

/// Regular lattice in the complex k plane. Index i runs along Re k, j along Im k.
class ComplexGrid {
public:
  /// Requires nx, ny >= 3 and ordered bounds.
  ComplexGrid(double re_min, double re_max, int nx, double im_min, double im_max, int ny);

  double re_min() const noexcept { return re_min_; }
  double re_max() const noexcept { return re_max_; }
  double im_min() const noexcept { return im_min_; }
  double im_max() const noexcept { return im_max_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double h_re() const noexcept { return h_re_; }
  double h_im() const noexcept { return h_im_; }
  std::size_t cells() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  double re(int i) const noexcept { return i == nx_ - 1 ? re_max_ : re_min_ + i * h_re_; }
  double im(int j) const noexcept { return j == ny_ - 1 ? im_max_ : im_min_ + j * h_im_; }
  cplx at(int i, int j) const noexcept { return {re(i), im(j)}; }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx_ + i; }

  /// The (nx - 2) x (ny - 2) lattice of interior points, same spacings.
  ComplexGrid interior() const;

  /// Grid with explicit spacings, as stored in a field file. Allows nx, ny >= 1.
  static ComplexGrid with_spacing(double re_min, double re_max, int nx, double im_min, double im_max, int ny,
                                  double h_re, double h_im);

  bool operator==(const ComplexGrid&) const = default;

private:
  ComplexGrid(double re_min, double re_max, int nx, double im_min, double im_max, int ny, double h_re, double h_im);

  double re_min_, re_max_, im_min_, im_max_;
  int nx_, ny_;
  double h_re_, h_im_;
};

/// Cell flags. Bits 0 and 1 exclude the cell; bits 2 and 3 only annotate it.
namespace mask_bits {
inline constexpr std::uint8_t domain = 1;          ///< near a branch cut, k = 0 or an F^{-1} pole
inline constexpr std::uint8_t failed = 2;          ///< an evaluation failed for some configuration
inline constexpr std::uint8_t below_kimax = 4;     ///< Im k < -k_imax, digits lost
inline constexpr std::uint8_t negative = 8;        ///< negative density
inline constexpr std::uint8_t excluded = domain | failed;
inline const char* const kEncoding = "bit0=domain,bit1=failed,bit2=below_kimax,bit3=negative_density";
}  // namespace mask_bits

enum class FieldKind { potential, density };
const char* to_string(FieldKind kind);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Values on a ComplexGrid. Density fields live on the interior of the
/// potential grid they came from.
struct ScalarField {
  ComplexGrid grid;
  FieldKind kind = FieldKind::potential;
  int n_configs = 0;
  std::vector<double> values;     ///< grid.index(i, j) order
  std::vector<double> std_error;  ///< ensemble standard error of a potential; empty otherwise
  std::vector<std::uint8_t> mask;
  Metadata meta;                  ///< provenance written to the CSV header

  double value(int i, int j) const { return values[grid.index(i, j)]; }
  std::uint8_t flags(int i, int j) const { return mask[grid.index(i, j)]; }
  bool usable(int i, int j) const { return (flags(i, j) & mask_bits::excluded) == 0; }
  std::string meta_value(const std::string& key) const;  ///< empty when absent
};

/// Ensemble mean of Phi at arbitrary points.
struct PotentialSample {
  std::vector<double> mean;
  std::vector<double> std_error;  ///< NaN with fewer than two successful configurations
  std::vector<int> failures;      ///< configurations that failed at each point
};

/// Phi(k) = (1/N) <ln|det M(k)|> over n_configs configurations with seeds
/// derive_seed(master_seed, c). Failed evaluations are counted and left out
/// of the mean. The result does not depend on the thread count.
PotentialSample sample_potential(const GasGeometry& geom, const ScatteringModel& model, const std::vector<cplx>& points,
                                 int n_configs, std::uint64_t master_seed, int threads = 0);

/// True when k lies within `window` of an excluded point: the even-d cut
/// arg k = -pi/2, k = 0 or a pole of F^{-1}.
bool near_domain_boundary(int d, const ScatteringModel& model, cplx k, double window_re, double window_im);

/// Potential on a grid. Cells near the domain boundary are masked and not
/// evaluated; cells with failures are masked and counted in meta "failures".
ScalarField potential_map(const GasGeometry& geom, const ScatteringModel& model, const ComplexGrid& grid, int n_configs,
                          std::uint64_t master_seed, int threads = 0);

/// 2 pi rho = discrete Laplacian of Phi on the interior. A cell is excluded
/// when any stencil point is; negative values are kept and flagged.
ScalarField density_from_potential(const ScalarField& potential);

struct CutPoint {
  double im_k;
  double value;
  std::uint8_t mask;
};

/// Column at Re k = re_k, linearly interpolated between grid columns.
std::vector<CutPoint> vertical_cut(const ScalarField& field, double re_k);

struct BandPoint {
  double im_k;
  double mean;
  double std_error;  ///< over the columns
  int columns;       ///< usable columns averaged
};

/// Row means over the columns with re_lo <= Re k <= re_hi, skipping excluded cells.
std::vector<BandPoint> band_average_cut(const ScalarField& field, double re_lo, double re_hi);

struct StencilCutOptions {
  double relative_step = 0.2;  ///< stencil spacing h = relative_step |Im k|
  int columns = 5;             ///< stencil centres spread over [re_k - spread, re_k + spread]
  double spread = 0.25;
  int threads = 0;
};

/// Density along Re k = re_k sampled at arbitrary Im k (typically log spaced)
/// with a five-point stencil scaled to each depth. `mean` averages the
/// ensemble density over the stencil centres.
std::vector<BandPoint> stencil_density_cut(const GasGeometry& geom, const ScatteringModel& model, double re_k,
                                           const std::vector<double>& im_values, int n_configs,
                                           std::uint64_t master_seed, const StencilCutOptions& options = {});

/// Flags cells with Im k < -k_imax.
void annotate_validity(ScalarField& field, double k_imax);

/// '#'-prefixed "key=value" header, a column line, then one row per cell:
/// re_k,im_k,value,mask_flag. Doubles use the shortest round-trip form.
void write_field_csv(std::ostream& out, const ScalarField& field);
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(std::istream& in);
ScalarField read_field_csv(const std::string& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

}  // namespace lorentz
