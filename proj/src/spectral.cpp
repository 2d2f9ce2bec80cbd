#include "irrl/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "irrl/errors.hpp"

namespace irrl {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void check_diffusion(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("diffusion D must be positive");
}

// Circle stencil: (M u)_i = sub u_{i-1} + diag_i u_i + super u_{i+1}.
struct CircleStencil {
  std::size_t n;
  double sub, super, centre;

  CircleStencil(std::size_t grid, double delta, double diffusion) : n(grid) {
    const double h = kTwoPi / static_cast<double>(grid);
    sub = diffusion / (h * h) - delta / (2.0 * h);
    super = diffusion / (h * h) + delta / (2.0 * h);
    centre = -2.0 * diffusion / (h * h);
  }
  bool metzler() const { return sub >= 0.0 && super >= 0.0; }
};

Eigen::MatrixXd circle_matrix(const CircleStencil& s, std::span<const double> f, double beta) {
  const auto n = static_cast<Eigen::Index>(s.n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = s.centre + beta * f[static_cast<std::size_t>(i)];
    m(i, (i + n - 1) % n) += s.sub;
    m(i, (i + 1) % n) += s.super;
  }
  return m;
}

// Solve (sigma I - M) x = r for the cyclic tridiagonal M (Sherman-Morrison + Thomas).
class CyclicSolver {
 public:
  CyclicSolver(const CircleStencil& s, std::span<const double> f, double beta, double sigma)
      : n_(s.n), lower_(-s.sub), upper_(-s.super), diag_(s.n), cp_(s.n), z_(s.n) {
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = sigma - s.centre - beta * f[i];
    // Corners: S(0, n-1) = -sub, S(n-1, 0) = -super.
    alpha_ = -s.super;
    beta_ = -s.sub;
    gamma_ = -diag_[0];
    diag_[0] -= gamma_;
    diag_[n_ - 1] -= alpha_ * beta_ / gamma_;
    factor();
    std::vector<double> u(n_, 0.0);
    u[0] = gamma_;
    u[n_ - 1] = alpha_;
    thomas(u, z_);
    denom_ = 1.0 + z_[0] + beta_ * z_[n_ - 1] / gamma_;
  }

  void solve(std::span<const double> r, std::span<double> x) const {
    thomas(r, x);
    const double fact = (x[0] + beta_ * x[n_ - 1] / gamma_) / denom_;
    for (std::size_t i = 0; i < n_; ++i) x[i] -= fact * z_[i];
  }

 private:
  void factor() {
    // Forward elimination coefficients of the tridiagonal part.
    piv_.resize(n_);
    piv_[0] = diag_[0];
    cp_[0] = upper_ / piv_[0];
    for (std::size_t i = 1; i < n_; ++i) {
      piv_[i] = diag_[i] - lower_ * cp_[i - 1];
      cp_[i] = upper_ / piv_[i];
    }
  }

  void thomas(std::span<const double> r, std::span<double> x) const {
    x[0] = r[0] / piv_[0];
    for (std::size_t i = 1; i < n_; ++i) x[i] = (r[i] - lower_ * x[i - 1]) / piv_[i];
    for (std::size_t i = n_ - 1; i-- > 0;) x[i] -= cp_[i] * x[i + 1];
  }

  std::size_t n_;
  double lower_, upper_;
  std::vector<double> diag_, cp_, piv_, z_;
  double alpha_ = 0, beta_ = 0, gamma_ = 0, denom_ = 1;
};

// Collatz-Wielandt bounds min/max (M v)_i / v_i for positive v.
std::pair<double, double> cw_bounds(const CircleStencil& s, std::span<const double> f, double beta,
                                    std::span<const double> v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const std::size_t n = s.n;
  for (std::size_t i = 0; i < n; ++i) {
    const double mv = s.sub * v[i == 0 ? n - 1 : i - 1] + (s.centre + beta * f[i]) * v[i] +
                      s.super * v[i + 1 == n ? 0 : i + 1];
    const double q = mv / v[i];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {lo, hi};
}

PrincipalEigenpair inverse_iteration(const CircleStencil& s, std::span<const double> f,
                                     double beta) {
  const std::size_t n = s.n;
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::fabs(v));
  const double norm = 2.0 * (s.sub + s.super) + std::fabs(beta) * fmax;
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor_tol = 64.0 * eps * norm;

  PrincipalEigenpair out;
  out.method = EigenMethod::inverse_iteration;
  std::vector<double> v(n, 1.0), w(n);
  auto [lo, hi] = cw_bounds(s, f, beta, v);
  double best_gap = hi - lo;
  std::size_t stalled = 0;
  for (std::size_t it = 0; it < 500; ++it) {
    const double gap = hi - lo;
    const double tol = std::max(1e-13 * std::max(1.0, std::fabs(hi)), floor_tol);
    if (gap <= tol || (stalled >= 5 && gap <= 1e3 * tol)) break;
    // Shift strictly above the spectrum so (sigma - M)^{-1} is a positive matrix.
    const double sigma = hi + std::max(0.1 * gap, 1e-8 * norm);
    CyclicSolver solver(s, f, beta, sigma);
    solver.solve(v, w);
    double mx = 0.0;
    for (double x : w) mx = std::max(mx, x);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = w[i] / mx;
      if (!(v[i] > 0.0))
        throw SolverError("inverse iteration lost positivity of the eigenvector");
    }
    std::tie(lo, hi) = cw_bounds(s, f, beta, v);
    ++out.iterations;
    if (hi - lo < 0.5 * best_gap) {
      best_gap = hi - lo;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (it + 1 == 500 && hi - lo > 1e3 * tol)
      throw SolverError("principal eigenvalue iteration did not converge");
  }
  out.lower = lo;
  out.upper = hi;
  out.value = 0.5 * (lo + hi);
  out.vector = std::move(v);
  return out;
}

PrincipalEigenpair dense_eigenpair(const CircleStencil& s, std::span<const double> f, double beta) {
  if (s.n > 512) throw ParameterError("dense eigensolve is limited to N <= 512");
  Eigen::EigenSolver<Eigen::MatrixXd> es(circle_matrix(s, f, beta), true);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  const auto& ev = es.eigenvalues();
  Eigen::Index top = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (ev(i).real() > ev(top).real()) top = i;
  PrincipalEigenpair out;
  out.method = EigenMethod::dense;
  out.value = ev(top).real();
  out.lower = out.upper = out.value;
  const Eigen::VectorXcd vec = es.eigenvectors().col(top);
  Eigen::Index big = 0;
  for (Eigen::Index i = 1; i < vec.size(); ++i)
    if (std::abs(vec(i)) > std::abs(vec(big))) big = i;
  const std::complex<double> phase = vec(big);
  out.vector.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    out.vector[i] = (vec(static_cast<Eigen::Index>(i)) / phase).real();
    if (!(out.vector[i] > 0.0)) throw SolverError("top eigenvector is not positive");
  }
  return out;
}

}  // namespace

FourierObservable FourierObservable::cosine() { return {{0.0, 0.5}}; }

FourierObservable FourierObservable::from_name(const std::string& name) {
  if (name == "cos") return cosine();
  if (name == "cos2") return {{0.0, 0.0, 0.5}};
  if (name == "cos+cos2") return {{0.0, 0.5, 0.25}};
  throw ParameterError("unknown Fourier observable '" + name + "'");
}

double FourierObservable::mean() const {
  return coefficients.empty() ? 0.0 : coefficients[0].real();
}

std::vector<double> FourierObservable::sample(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    double s = mean();
    for (std::size_t k = 1; k < coefficients.size(); ++k)
      s += 2.0 * (coefficients[k] * std::polar(1.0, static_cast<double>(k) * x)).real();
    out[j] = s;
  }
  return out;
}

double fourier_sigma2(const FourierObservable& f, double delta, double diffusion) {
  check_diffusion(diffusion);
  double s = 0.0;
  bool nonconstant = false;
  for (std::size_t n = 1; n < f.coefficients.size(); ++n) {
    const double c2 = std::norm(f.coefficients[n]);
    if (c2 > 0.0) nonconstant = true;
    const double nn = static_cast<double>(n);
    s += 4.0 * c2 * diffusion / (diffusion * diffusion * nn * nn + delta * delta);
  }
  if (!nonconstant) throw ParameterError("observable is constant: all Fourier coefficients vanish");
  return s;
}

std::complex<double> generator_symbol(long n, std::size_t grid, double delta, double diffusion) {
  const double h = kTwoPi / static_cast<double>(grid);
  const double nh = static_cast<double>(n) * h;
  return {-(2.0 * diffusion / (h * h)) * (1.0 - std::cos(nh)), (delta / h) * std::sin(nh)};
}

std::complex<double> GeneratorSpectrum::mode(long n) const {
  const auto target = generator_symbol(n, grid, delta, diffusion);
  return *std::min_element(eigenvalues.begin(), eigenvalues.end(), [&](auto a, auto b) {
    return std::abs(a - target) < std::abs(b - target);
  });
}

GeneratorSpectrum generator_spectrum(std::size_t grid, double delta, double diffusion) {
  check_diffusion(diffusion);
  if (grid < 8) throw ParameterError("generator spectrum needs N >= 8");
  if (grid > 2048) throw ParameterError("generator spectrum is limited to N <= 2048");
  const CircleStencil s(grid, delta, diffusion);
  const std::vector<double> zero(grid, 0.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(circle_matrix(s, zero, 0.0), false);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  GeneratorSpectrum out{grid, delta, diffusion, {}};
  out.eigenvalues.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  return out;
}

PrincipalEigenpair principal_eigenpair(std::span<const double> f, double beta, double delta,
                                       double diffusion, EigenMethod method) {
  check_diffusion(diffusion);
  if (f.size() < 8) throw ParameterError("principal eigenvalue needs at least 8 grid nodes");
  for (double v : f)
    if (!std::isfinite(v)) throw ParameterError("observable samples must be finite");
  if (!std::isfinite(beta)) throw ParameterError("beta must be finite");
  const CircleStencil s(f.size(), delta, diffusion);
  if (method == EigenMethod::automatic)
    method = s.metzler() ? EigenMethod::inverse_iteration : EigenMethod::dense;
  if (method == EigenMethod::inverse_iteration) {
    if (!s.metzler())
      throw ParameterError("inverse iteration needs h < 2D/|delta| (off-diagonals must be >= 0)");
    return inverse_iteration(s, f, beta);
  }
  return dense_eigenpair(s, f, beta);
}

double principal_eigenvalue(std::span<const double> f, double beta, double delta, double diffusion,
                            EigenMethod method) {
  return principal_eigenpair(f, beta, delta, diffusion, method).value;
}

double principal_eigenvalue_torus(const PotentialField& u, const DriftField& c,
                                  std::span<const double> f, double beta, double diffusion,
                                  std::size_t n) {
  check_diffusion(diffusion);
  if (u.dimension() != 2 || c.dimension() != 2 || !u.is_torus())
    throw ParameterError("torus eigenvalue needs a 2D periodic potential and drift");
  if (n < 4 || n > 64) throw ParameterError("torus eigenvalue supports 4 <= n <= 64");
  if (f.size() != n * n) throw ParameterError("observable samples must have n*n entries");
  const double h = u.periods()[0] / static_cast<double>(n);
  const auto total = static_cast<Eigen::Index>(n * n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(total, total);
  std::vector<double> x(2), g(2), cc(2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n + j);
      x[0] = static_cast<double>(i) * h;
      x[1] = static_cast<double>(j) * h;
      u.gradient(x, g);
      c.evaluate(x, cc);
      const double bx = cc[0] - g[0], by = cc[1] - g[1];
      const auto at = [&](std::size_t a, std::size_t b) {
        return static_cast<Eigen::Index>((a % n) * n + (b % n));
      };
      m(row, row) += -4.0 * diffusion / (h * h) + beta * f[i * n + j];
      m(row, at(i + 1, j)) += diffusion / (h * h) + bx / (2.0 * h);
      m(row, at(i + n - 1, j)) += diffusion / (h * h) - bx / (2.0 * h);
      m(row, at(i, j + 1)) += diffusion / (h * h) + by / (2.0 * h);
      m(row, at(i, j + n - 1)) += diffusion / (h * h) - by / (2.0 * h);
    }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& e : es.eigenvalues()) top = std::max(top, e.real());
  return top;
}

namespace {

constexpr double kBetaStep = 1e-4;
constexpr double kBetaBound = 50.0;

struct LambdaDerivs {
  double value, first, second;
};

LambdaDerivs lambda_derivs(std::span<const double> f, double beta, double delta, double d) {
  const double lp = principal_eigenvalue(f, beta + kBetaStep, delta, d);
  const double l0 = principal_eigenvalue(f, beta, delta, d);
  const double lm = principal_eigenvalue(f, beta - kBetaStep, delta, d);
  return {l0, (lp - lm) / (2.0 * kBetaStep), (lp - 2.0 * l0 + lm) / (kBetaStep * kBetaStep)};
}

RatePoint legendre_point(std::span<const double> f, double delta, double d, double ell,
                         double mean, double curvature0) {
  double lo = -kBetaBound, hi = kBetaBound;
  if (!(lambda_derivs(f, lo, delta, d).first < ell && lambda_derivs(f, hi, delta, d).first > ell))
    throw SolverError("Legendre maximizer is outside the beta bracket [-50, 50]");
  double beta = curvature0 > 0.0 ? std::clamp((ell - mean) / curvature0, lo, hi) : 0.0;
  for (int it = 0; it < 200; ++it) {
    const auto ld = lambda_derivs(f, beta, delta, d);
    const double g = ld.first - ell;
    (g < 0.0 ? lo : hi) = beta;
    double next = ld.second > 0.0 ? beta - g / ld.second : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::fabs(g) <= 1e-11 || std::fabs(next - beta) <= 1e-10 * std::max(1.0, std::fabs(beta)) ||
                      hi - lo <= 1e-12;
    if (done) return {ell, beta, beta * ell - ld.value};
    beta = next;
  }
  throw SolverError("Newton iteration for the Legendre transform did not converge");
}

void check_convex(const std::vector<RatePoint>& pts) {
  std::vector<RatePoint> s = pts;
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.ell < b.ell; });
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double l = s[i].ell - s[i - 1].ell, r = s[i + 1].ell - s[i].ell;
    if (l <= 0.0 || r <= 0.0) continue;
    const double slope_l = (s[i].rate - s[i - 1].rate) / l;
    const double slope_r = (s[i + 1].rate - s[i].rate) / r;
    if ((slope_r - slope_l) * 0.5 * (l + r) < -1e-8)
      throw SolverError("rate curve fails the convexity check near ell = " + std::to_string(s[i].ell));
  }
}

}  // namespace

std::vector<RatePoint> observable_rate(std::span<const double> f, double delta, double diffusion,
                                       std::span<const double> ell, Execution exec) {
  check_diffusion(diffusion);
  if (f.size() < 8) throw ParameterError("observable needs at least 8 grid nodes");
  const auto [fmin_it, fmax_it] = std::minmax_element(f.begin(), f.end());
  const double fmin = *fmin_it, fmax = *fmax_it;
  for (double l : ell)
    if (!(l > fmin && l < fmax))
      throw ParameterError("ell = " + std::to_string(l) + " is outside the open range of f");
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  const double curvature0 = lambda_derivs(f, 0.0, delta, diffusion).second;

  std::vector<RatePoint> out(ell.size());
  std::vector<std::exception_ptr> errors(ell.size());
  const auto count = static_cast<std::ptrdiff_t>(ell.size());
  const auto one = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = legendre_point(f, delta, diffusion, ell[k], mean, curvature0);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  check_convex(out);
  return out;
}

Curvature rate_curvature(std::span<const double> f, double delta, double diffusion) {
  if (f.empty()) throw ParameterError("empty observable");
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  Curvature c;
  for (double v : f) c.mean += v;
  c.mean /= static_cast<double>(f.size());
  c.step = 1e-3 * (*hi - *lo);
  if (!(c.step > 0.0)) throw ParameterError("observable is constant");
  const std::vector<double> ell{c.mean - c.step, c.mean, c.mean + c.step};
  const auto r = observable_rate(f, delta, diffusion, ell, Execution::serial);
  c.curvature = (r[0].rate - 2.0 * r[1].rate + r[2].rate) / (c.step * c.step);
  if (!(c.curvature > 0.0)) throw SolverError("rate curvature at the mean is not positive");
  c.implied_sigma2 = 1.0 / c.curvature;
  return c;
}

SpectralReport spectral_report(const FourierObservable& f, double delta, double diffusion,
                               std::size_t grid, std::span<const double> ell,
                               std::span<const double> beta) {
  SpectralReport r;
  r.delta = delta;
  r.diffusion = diffusion;
  r.grid = grid;
  r.eigenvalues = generator_spectrum(grid, delta, diffusion).eigenvalues;
  r.sigma2 = fourier_sigma2(f, delta, diffusion);
  const auto samples = f.sample(grid);
  for (double b : beta) r.lambda_of_beta.emplace_back(b, principal_eigenvalue(samples, b, delta, diffusion));
  r.rate_curve = observable_rate(samples, delta, diffusion, ell);
  r.curvature = rate_curvature(samples, delta, diffusion);
  return r;
}

}  // namespace irrl
