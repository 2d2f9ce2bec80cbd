#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "irrl/drift.hpp"
#include "irrl/field.hpp"

namespace irrl {

/// Real observable on the circle, f(x) = c_0 + 2 Re sum_{n>=1} c_n e^{inx}.
struct FourierObservable {
  std::vector<std::complex<double>> coefficients;  ///< c_0 .. c_{n_max}; c_{-n} = conj(c_n)

  static FourierObservable cosine();  ///< c_{+-1} = 1/2
  /// `cos` (cos x), `cos2` (cos 2x), `cos+cos2` (cos x + cos 2x / 2).
  static FourierObservable from_name(const std::string& name);

  double mean() const;
  /// Values at x_j = 2 pi j / n.
  std::vector<double> sample(std::size_t n) const;
};

/// sigma^2 = sum_{n>=1} 4 |c_n|^2 D / (D^2 n^2 + delta^2), i.e. 2 int_0^inf <e^{tL} f, f> dt
/// for L = D d^2/dx^2 + delta d/dx.
double fourier_sigma2(const FourierObservable& f, double delta, double diffusion);

/// Closed-form eigenvalue of mode n for the centered-difference generator:
/// -(2D/h^2)(1 - cos nh) + i (delta/h) sin nh, h = 2 pi / N.
std::complex<double> generator_symbol(long n, std::size_t grid, double delta, double diffusion);

struct GeneratorSpectrum {
  std::size_t grid = 0;
  double delta = 0.0;
  double diffusion = 1.0;
  /// Sorted by decreasing real part, ties by increasing imaginary part.
  std::vector<std::complex<double>> eigenvalues;

  /// Computed eigenvalue closest to mode n's closed-form value.
  std::complex<double> mode(long n) const;
};

/// Eigenvalues of the N x N periodic centered-difference discretization of
/// D d^2/dx^2 + delta d/dx, by a dense eigensolve.
GeneratorSpectrum generator_spectrum(std::size_t grid, double delta, double diffusion);

enum class EigenMethod {
  automatic,  ///< inverse iteration when the matrix is Metzler, dense otherwise
  inverse_iteration,
  dense,
};

struct PrincipalEigenpair {
  double value = 0.0;
  std::vector<double> vector;  ///< positive, max entry 1
  double lower = 0.0;          ///< Collatz-Wielandt bounds (inverse iteration)
  double upper = 0.0;
  std::size_t iterations = 0;
  EigenMethod method = EigenMethod::automatic;
};

/// Top eigenpair of D Delta_h + delta grad_h + beta diag(f) on the uniform
/// circle grid of f.size() nodes. Throws SolverError if the iteration cap is
/// hit or the eigenvector is not positive.
PrincipalEigenpair principal_eigenpair(std::span<const double> f, double beta, double delta,
                                       double diffusion, EigenMethod method = EigenMethod::automatic);
double principal_eigenvalue(std::span<const double> f, double beta, double delta, double diffusion,
                            EigenMethod method = EigenMethod::automatic);

/// Top eigenvalue of D Delta_h + b . grad_h + beta f on an n x n torus grid,
/// b = -grad U + C at the nodes; dense, n <= 64.
double principal_eigenvalue_torus(const PotentialField& u, const DriftField& c,
                                  std::span<const double> f, double beta, double diffusion,
                                  std::size_t n);

struct RatePoint {
  double ell = 0.0;
  double beta = 0.0;  ///< maximizer, lambda'(beta) = ell
  double rate = 0.0;  ///< beta ell - lambda(beta f)
};

enum class Execution { serial, parallel };

/// Legendre transform sup_beta {beta ell - lambda(beta f)} at each ell.
/// Throws ParameterError for ell outside (min f, max f), SolverError when
/// Newton/bisection fails or the curve is not convex.
std::vector<RatePoint> observable_rate(std::span<const double> f, double delta, double diffusion,
                                       std::span<const double> ell,
                                       Execution exec = Execution::parallel);

struct Curvature {
  double mean = 0.0;       ///< f-bar
  double step = 0.0;       ///< ell step
  double curvature = 0.0;  ///< second derivative of the rate at f-bar
  /// 1 / curvature: the asymptotic variance sigma^2 = 2 int c, since the rate
  /// is (ell - f-bar)^2 / (2 sigma^2) to second order.
  double implied_sigma2 = 0.0;
};

Curvature rate_curvature(std::span<const double> f, double delta, double diffusion);

struct SpectralReport {
  double delta = 0.0;
  double diffusion = 1.0;
  std::size_t grid = 0;
  std::vector<std::complex<double>> eigenvalues;
  double sigma2 = 0.0;
  std::vector<std::pair<double, double>> lambda_of_beta;
  std::vector<RatePoint> rate_curve;
  Curvature curvature;
};

SpectralReport spectral_report(const FourierObservable& f, double delta, double diffusion,
                               std::size_t grid, std::span<const double> ell,
                               std::span<const double> beta);

}  // namespace irrl
