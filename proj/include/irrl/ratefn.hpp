#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "irrl/drift.hpp"
#include "irrl/field.hpp"
#include "irrl/grid.hpp"

namespace irrl {

enum class Discretization {
  spectral,       ///< Fourier gradient G, operator G^T P G with P = diag(p) at nodes
  finite_volume,  ///< forward-difference face gradient, arithmetic face densities
};

std::string to_string(Discretization d);
Discretization discretization_from_string(const std::string& name);

/// One component array per axis, at the operator's flux points.
using GridVectorField = std::vector<std::vector<double>>;

/// Discrete gradient G and its transpose on a periodic grid, plus the
/// quadrature used for flux integrals. The gauge operator is A = G^T P G.
class FluxOperator {
 public:
  FluxOperator(const PeriodicGrid& grid, Discretization scheme);
  ~FluxOperator();
  FluxOperator(FluxOperator&&) noexcept;
  FluxOperator& operator=(FluxOperator&&) noexcept;

  const PeriodicGrid& grid() const noexcept { return grid_; }
  Discretization scheme() const noexcept { return scheme_; }
  int dims() const noexcept { return grid_.dims; }
  std::size_t size() const noexcept { return grid_.size(); }

  GridVectorField gradient(std::span<const double> u) const;
  /// G^T applied to a flux field; spectral: -div, finite volume: backward-difference -div.
  std::vector<double> gradient_transpose(const GridVectorField& flux) const;

  /// Density at the flux points of each axis.
  GridVectorField flux_density(const GridDensity& p) const;
  /// Coordinates of flux point idx on axis k.
  void flux_point(std::size_t idx, int axis, std::span<double> out) const;

  /// b = -G U + C at the flux points. U and C must be defined on this torus.
  GridVectorField drift(const PotentialField& u, const DriftField* c) const;
  /// C at the flux points.
  GridVectorField sample(const DriftField& c) const;

  /// int sum_k w_k |v_k|^2 dx with weights w = flux density (mean over flux points).
  double weighted_norm2(const GridVectorField& w, const GridVectorField& v) const;
  double weighted_dot(const GridVectorField& w, const GridVectorField& a,
                      const GridVectorField& b) const;

  /// A u = G^T (P G u) for face densities P.
  void apply(const GridVectorField& face_density, std::span<const double> u,
             std::span<double> out) const;

  /// Remove the null space of G: the mean and, for the spectral scheme on even
  /// grids, the Nyquist modes.
  void project(std::span<double> u) const;

  /// Approximate inverse of A for the given node density: P^{-1/2} L^+ P^{-1/2}.
  void precondition(std::span<const double> inv_sqrt_p, std::span<const double> r,
                    std::span<double> out) const;

 private:
  struct Impl;
  PeriodicGrid grid_;
  Discretization scheme_;
  std::unique_ptr<Impl> impl_;
};

struct GaugeField {
  std::vector<double> values;  ///< mean zero
  double residual_norm = 0.0;  ///< max |G^T p (b + G psi)| / (max |p b| / h)
  std::size_t iterations = 0;
  std::vector<double> residual_history;
};

struct CgOptions {
  double tolerance = 1e-12;       ///< relative to the flux scale
  double accept = 1e-10;          ///< final true residual bound
  std::size_t max_iterations = 0; ///< 0: 10 * grid size
};

/// Solve div[p (b + grad psi)] = 0 on the grid, gauge mean-zero.
/// Throws ParameterError on size mismatch, SolverError on non-convergence.
GaugeField solve_gauge_field(const FluxOperator& op, const GridDensity& p,
                             const GridVectorField& b, const CgOptions& options = {});
GaugeField solve_gauge_field(const GridDensity& p, const GridVectorField& b,
                             Discretization scheme = Discretization::spectral,
                             const CgOptions& options = {});

/// (1/(4D)) int |D grad log p + grad U|^2 dmu.
double rate_reversible(const FluxOperator& op, const GridDensity& p, const PotentialField& u,
                       double diffusion);
double rate_reversible(const GridDensity& p, const PotentialField& u, double diffusion,
                       Discretization scheme = Discretization::spectral);

struct RateReport {
  double I0 = 0.0;
  double J_C = 0.0;         ///< (1/(4D)) int |grad psi_C - grad U|^2 dmu
  double I_C = 0.0;         ///< I0 + J_C
  double gartner = 0.0;     ///< (1/(4D)) int |D grad log p + grad psi_C|^2 dmu
  double three_term = 0.0;  ///< three-term form of the same quantity
  double mismatch = 0.0;    ///< max of |I_C - gartner| and |gartner - three_term|
  bool has_K = false;
  double K = 0.0;
  double residual_psi = 0.0;
  double residual_xi = 0.0;
  std::size_t iterations = 0;
  double max_div_pc = 0.0;  ///< max |div(p C)| on the grid
  double invariance_residual = 0.0;
  double diffusion = 0.5;
  double delta = 0.0;
  PeriodicGrid grid;
  Discretization scheme = Discretization::spectral;
};

struct RateOptions {
  bool compute_K = false;
  CgOptions cg;
};

RateReport rate_irreversible(const FluxOperator& op, const GridDensity& p, const PotentialField& u,
                             const DriftField& c, double diffusion, const RateOptions& options = {});
RateReport rate_irreversible(const GridDensity& p, const PotentialField& u, const DriftField& c,
                             double diffusion, Discretization scheme = Discretization::spectral,
                             const RateOptions& options = {});

/// K = (1/(4D)) int |grad xi|^2 dmu with div[p (C0 + grad xi)] = 0, C0 = c.with_delta(1).
double quadratic_coefficient(const FluxOperator& op, const GridDensity& p, const DriftField& c,
                             double diffusion, GaugeField* xi = nullptr, const CgOptions& cg = {});
double quadratic_coefficient(const GridDensity& p, const DriftField& c, double diffusion,
                             Discretization scheme = Discretization::spectral);

/// Circle, D = 1/2, constant drift delta:
/// (1/8) int |p'/p|^2 dmu + (delta^2/2) (1 - 1 / int (1/p) dx), with p' spectral.
double circle_rate_closed_form(const GridDensity& p, double delta);

}  // namespace irrl
