#include "irrl/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "irrl/errors.hpp"
#include "irrl/fft.hpp"
#include "irrl/kernels.hpp"

namespace irrl {

namespace {

using cvec = std::vector<std::complex<double>>;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string to_string(Discretization d) {
  return d == Discretization::spectral ? "spectral" : "finite-volume";
}

Discretization discretization_from_string(const std::string& name) {
  if (name == "spectral") return Discretization::spectral;
  if (name == "finite-volume" || name == "fv") return Discretization::finite_volume;
  throw ParameterError("unknown discretization '" + name + "'");
}

struct FluxOperator::Impl {
  mutable GridFft fft;
  std::vector<double> wave[2];  ///< derivative multiplier per node index, per axis
  std::vector<double> symbol;   ///< Fourier symbol of G^T G
  mutable cvec spec, work;

  Impl(const PeriodicGrid& g, Discretization scheme) : fft(g.dims, g.n) {
    const double k0 = 2.0 * M_PI / g.period;
    const double h = g.h();
    std::vector<double> axis_sym(g.n);
    std::vector<double> axis_wave(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
      const long k = wavenumber(j, g.n);
      const bool nyquist = g.n % 2 == 0 && 2 * static_cast<std::size_t>(std::labs(k)) == g.n;
      const double kk = nyquist ? 0.0 : k0 * static_cast<double>(k);
      axis_wave[j] = kk;
      if (scheme == Discretization::spectral) {
        axis_sym[j] = kk * kk;
      } else {
        const double s = std::sin(0.5 * k0 * static_cast<double>(k) * h);
        axis_sym[j] = 4.0 * s * s / (h * h);
      }
    }
    const std::size_t total = g.size();
    symbol.resize(total);
    for (int a = 0; a < g.dims; ++a) wave[a].resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t i = g.dims == 1 ? idx : idx / g.n;
      const std::size_t j = g.dims == 1 ? 0 : idx % g.n;
      wave[0][idx] = axis_wave[i];
      symbol[idx] = axis_sym[i];
      if (g.dims == 2) {
        wave[1][idx] = axis_wave[j];
        symbol[idx] += axis_sym[j];
      }
    }
    spec.resize(total);
    work.resize(total);
  }
};

FluxOperator::FluxOperator(const PeriodicGrid& grid, Discretization scheme)
    : grid_(grid), scheme_(scheme), impl_(std::make_unique<Impl>(grid, scheme)) {}
FluxOperator::~FluxOperator() = default;
FluxOperator::FluxOperator(FluxOperator&&) noexcept = default;
FluxOperator& FluxOperator::operator=(FluxOperator&&) noexcept = default;

GridVectorField FluxOperator::gradient(std::span<const double> u) const {
  if (u.size() != size()) throw ParameterError("field size does not match the grid");
  GridVectorField out(static_cast<std::size_t>(dims()), std::vector<double>(size()));
  if (scheme_ == Discretization::spectral) {
    impl_->fft.forward(u, impl_->spec);
    for (int a = 0; a < dims(); ++a) {
      const auto& w = impl_->wave[a];
      for (std::size_t i = 0; i < size(); ++i)
        impl_->work[i] = std::complex<double>(0.0, w[i]) * impl_->spec[i];
      impl_->fft.inverse(impl_->work, out[static_cast<std::size_t>(a)]);
    }
    return out;
  }
  const std::size_t n = grid_.n;
  const double inv_h = 1.0 / grid_.h();
  for (std::size_t idx = 0; idx < size(); ++idx) {
    if (dims() == 1) {
      out[0][idx] = (u[idx + 1 == n ? 0 : idx + 1] - u[idx]) * inv_h;
    } else {
      const std::size_t i = idx / n, j = idx % n;
      out[0][idx] = (u[(i + 1 == n ? 0 : i + 1) * n + j] - u[idx]) * inv_h;
      out[1][idx] = (u[i * n + (j + 1 == n ? 0 : j + 1)] - u[idx]) * inv_h;
    }
  }
  return out;
}

std::vector<double> FluxOperator::gradient_transpose(const GridVectorField& flux) const {
  if (flux.size() != static_cast<std::size_t>(dims())) throw ParameterError("flux has wrong rank");
  std::vector<double> out(size(), 0.0);
  if (scheme_ == Discretization::spectral) {
    std::fill(impl_->work.begin(), impl_->work.end(), std::complex<double>(0.0, 0.0));
    for (int a = 0; a < dims(); ++a) {
      impl_->fft.forward(flux[static_cast<std::size_t>(a)], impl_->spec);
      const auto& w = impl_->wave[a];
      for (std::size_t i = 0; i < size(); ++i)
        impl_->work[i] -= std::complex<double>(0.0, w[i]) * impl_->spec[i];
    }
    impl_->fft.inverse(impl_->work, out);
    return out;
  }
  const std::size_t n = grid_.n;
  const double inv_h = 1.0 / grid_.h();
  for (std::size_t idx = 0; idx < size(); ++idx) {
    if (dims() == 1) {
      out[idx] = (flux[0][idx == 0 ? n - 1 : idx - 1] - flux[0][idx]) * inv_h;
    } else {
      const std::size_t i = idx / n, j = idx % n;
      out[idx] = (flux[0][(i == 0 ? n - 1 : i - 1) * n + j] - flux[0][idx] +
                  flux[1][i * n + (j == 0 ? n - 1 : j - 1)] - flux[1][idx]) *
                 inv_h;
    }
  }
  return out;
}

GridVectorField FluxOperator::flux_density(const GridDensity& p) const {
  if (p.size() != size()) throw ParameterError("density does not match the operator grid");
  const auto& v = p.values();
  GridVectorField out(static_cast<std::size_t>(dims()));
  if (scheme_ == Discretization::spectral) {
    for (auto& c : out) c = v;
    return out;
  }
  const std::size_t n = grid_.n;
  for (int a = 0; a < dims(); ++a) out[static_cast<std::size_t>(a)].resize(size());
  for (std::size_t idx = 0; idx < size(); ++idx) {
    if (dims() == 1) {
      out[0][idx] = 0.5 * (v[idx] + v[idx + 1 == n ? 0 : idx + 1]);
    } else {
      const std::size_t i = idx / n, j = idx % n;
      out[0][idx] = 0.5 * (v[idx] + v[(i + 1 == n ? 0 : i + 1) * n + j]);
      out[1][idx] = 0.5 * (v[idx] + v[i * n + (j + 1 == n ? 0 : j + 1)]);
    }
  }
  return out;
}

void FluxOperator::flux_point(std::size_t idx, int axis, std::span<double> out) const {
  if (scheme_ == Discretization::spectral)
    grid_.point(idx, out);
  else
    grid_.point(idx, out, axis, 0.5);
}

namespace {

void check_torus(const PeriodicGrid& g, const PotentialField& u) {
  if (static_cast<int>(u.dimension()) != g.dims)
    throw ParameterError("potential dimension does not match the grid");
  if (!u.is_torus()) throw ParameterError("rate functions need a periodic potential");
  for (double L : u.periods())
    if (std::fabs(L - g.period) > 1e-12 * g.period)
      throw ParameterError("potential period does not match the grid period");
}

}  // namespace

GridVectorField FluxOperator::sample(const DriftField& c) const {
  if (static_cast<int>(c.dimension()) != dims())
    throw ParameterError("drift dimension does not match the grid");
  GridVectorField out(static_cast<std::size_t>(dims()), std::vector<double>(size()));
  std::vector<double> x(static_cast<std::size_t>(dims())), v(x.size());
  for (int a = 0; a < dims(); ++a)
    for (std::size_t idx = 0; idx < size(); ++idx) {
      flux_point(idx, a, x);
      c.evaluate(x, v);
      out[static_cast<std::size_t>(a)][idx] = v[static_cast<std::size_t>(a)];
    }
  return out;
}

GridVectorField FluxOperator::drift(const PotentialField& u, const DriftField* c) const {
  check_torus(grid_, u);
  const auto un = grid_.sample([&](std::span<const double> x) { return u.energy(x); });
  auto b = gradient(un);
  for (auto& comp : b)
    for (double& v : comp) v = -v;
  if (c && !c->is_zero()) {
    const auto cs = sample(*c);
    for (std::size_t a = 0; a < b.size(); ++a)
      for (std::size_t i = 0; i < size(); ++i) b[a][i] += cs[a][i];
  }
  return b;
}

double FluxOperator::weighted_dot(const GridVectorField& w, const GridVectorField& a,
                                  const GridVectorField& b) const {
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t i = 0; i < size(); ++i) s += w[k][i] * a[k][i] * b[k][i];
  return s / static_cast<double>(size());
}

double FluxOperator::weighted_norm2(const GridVectorField& w, const GridVectorField& v) const {
  return weighted_dot(w, v, v);
}

void FluxOperator::apply(const GridVectorField& face, std::span<const double> u,
                         std::span<double> out) const {
  if (scheme_ == Discretization::finite_volume) {
    kernels::FvStencil s;
    s.dims = dims();
    s.n = grid_.n;
    s.h = grid_.h();
    for (int a = 0; a < dims(); ++a) s.face[a] = face[static_cast<std::size_t>(a)];
    kernels::omp::fv_apply(s, u, out);
    return;
  }
  auto g = gradient(u);
  for (std::size_t a = 0; a < g.size(); ++a) kernels::omp::multiply(face[a], g[a], g[a]);
  const auto r = gradient_transpose(g);
  std::copy(r.begin(), r.end(), out.begin());
}

void FluxOperator::project(std::span<double> u) const {
  impl_->fft.forward(std::span<const double>(u.data(), u.size()), impl_->spec);
  for (std::size_t i = 0; i < size(); ++i)
    if (impl_->symbol[i] == 0.0) impl_->spec[i] = 0.0;
  impl_->fft.inverse(impl_->spec, u);
}

void FluxOperator::precondition(std::span<const double> inv_sqrt_p, std::span<const double> r,
                                std::span<double> out) const {
  std::vector<double> t(size());
  kernels::omp::multiply(inv_sqrt_p, r, t);
  impl_->fft.forward(t, impl_->spec);
  for (std::size_t i = 0; i < size(); ++i) {
    const double s = impl_->symbol[i];
    impl_->spec[i] = s == 0.0 ? std::complex<double>(0.0, 0.0) : impl_->spec[i] / s;
  }
  impl_->fft.inverse(impl_->spec, t);
  kernels::omp::multiply(inv_sqrt_p, t, out);
  project(out);
}

GaugeField solve_gauge_field(const FluxOperator& op, const GridDensity& p,
                             const GridVectorField& b, const CgOptions& options) {
  const std::size_t n = op.size();
  if (p.size() != n) throw ParameterError("density does not match the operator grid");
  if (b.size() != static_cast<std::size_t>(op.dims())) throw ParameterError("drift has wrong rank");
  for (const auto& c : b)
    if (c.size() != n) throw ParameterError("drift component has wrong size");

  const auto face = op.flux_density(p);
  GridVectorField pb = b;
  double scale = 0.0;
  for (std::size_t a = 0; a < pb.size(); ++a)
    for (std::size_t i = 0; i < n; ++i) {
      pb[a][i] *= face[a][i];
      if (!std::isfinite(pb[a][i])) throw NumericError("non-finite drift on the grid", i);
      scale = std::max(scale, std::fabs(pb[a][i]));
    }

  GaugeField out;
  out.values.assign(n, 0.0);
  if (scale == 0.0) return out;
  // Divergences of a flux of size F are of size F / h.
  scale /= op.grid().h();

  // A psi = rhs with A = G^T P G and rhs = -G^T (p b).
  std::vector<double> rhs = op.gradient_transpose(pb);
  for (double& v : rhs) v = -v;
  op.project(rhs);

  std::vector<double> inv_sqrt_p(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt_p[i] = 1.0 / std::sqrt(p[i]);

  const std::size_t max_it = options.max_iterations ? options.max_iterations : 10 * n;
  std::vector<double>& x = out.values;
  std::vector<double> r = rhs, z(n), d(n), ad(n);
  double res = max_abs(r) / scale;
  out.residual_history.push_back(res);
  if (res > options.tolerance) {
    op.precondition(inv_sqrt_p, r, z);
    d = z;
    double rz = dot(r, z);
    double best = res;
    std::size_t since_best = 0;
    for (std::size_t it = 0; it < max_it; ++it) {
      op.apply(face, d, ad);
      const double dad = dot(d, ad);
      if (!(dad > 0.0)) break;
      const double alpha = rz / dad;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * d[i];
        r[i] -= alpha * ad[i];
      }
      ++out.iterations;
      res = max_abs(r) / scale;
      out.residual_history.push_back(res);
      if (res <= options.tolerance) break;
      if (res < best) {
        best = res;
        since_best = 0;
      } else if (++since_best > 200) {
        break;  // stagnated at the rounding floor
      }
      op.precondition(inv_sqrt_p, r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
    }
  }

  op.project(x);
  // True residual of the flux balance G^T p (b + G psi).
  op.apply(face, x, ad);
  for (std::size_t i = 0; i < n; ++i) ad[i] -= rhs[i];
  out.residual_norm = max_abs(ad) / scale;
  if (!(out.residual_norm <= options.accept))
    throw SolverError("gauge solve did not converge: residual " +
                          std::to_string(out.residual_norm) + " after " +
                          std::to_string(out.iterations) + " iterations",
                      out.residual_history);
  return out;
}

GaugeField solve_gauge_field(const GridDensity& p, const GridVectorField& b,
                             Discretization scheme, const CgOptions& options) {
  return solve_gauge_field(FluxOperator(p.grid(), scheme), p, b, options);
}

namespace {

GridVectorField log_gradient(const FluxOperator& op, const GridDensity& p) {
  std::vector<double> lp(p.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lp[i] = std::log(p[i]);
  return op.gradient(lp);
}

GridVectorField potential_gradient(const FluxOperator& op, const PotentialField& u) {
  check_torus(op.grid(), u);
  return op.gradient(op.grid().sample([&](std::span<const double> x) { return u.energy(x); }));
}

void check_diffusion(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ParameterError("diffusion D must be positive");
}

}  // namespace

double rate_reversible(const FluxOperator& op, const GridDensity& p, const PotentialField& u,
                       double diffusion) {
  check_diffusion(diffusion);
  auto v = log_gradient(op, p);
  const auto gu = potential_gradient(op, u);
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t i = 0; i < op.size(); ++i) v[a][i] = diffusion * v[a][i] + gu[a][i];
  return op.weighted_norm2(op.flux_density(p), v) / (4.0 * diffusion);
}

double rate_reversible(const GridDensity& p, const PotentialField& u, double diffusion,
                       Discretization scheme) {
  return rate_reversible(FluxOperator(p.grid(), scheme), p, u, diffusion);
}

double quadratic_coefficient(const FluxOperator& op, const GridDensity& p, const DriftField& c,
                             double diffusion, GaugeField* xi_out, const CgOptions& cg) {
  check_diffusion(diffusion);
  const auto c0 = c.with_delta(1.0);
  auto xi = solve_gauge_field(op, p, op.sample(c0), cg);
  const double k = op.weighted_norm2(op.flux_density(p), op.gradient(xi.values)) / (4.0 * diffusion);
  if (xi_out) *xi_out = std::move(xi);
  return k;
}

double quadratic_coefficient(const GridDensity& p, const DriftField& c, double diffusion,
                             Discretization scheme) {
  return quadratic_coefficient(FluxOperator(p.grid(), scheme), p, c, diffusion);
}

RateReport rate_irreversible(const FluxOperator& op, const GridDensity& p, const PotentialField& u,
                             const DriftField& c, double diffusion, const RateOptions& options) {
  check_diffusion(diffusion);
  const double D = diffusion;
  RateReport rep;
  rep.diffusion = D;
  rep.delta = c.delta();
  rep.grid = op.grid();
  rep.scheme = op.scheme();

  const auto face = op.flux_density(p);
  const auto b = op.drift(u, &c);
  const auto psi = solve_gauge_field(op, p, b, options.cg);
  rep.residual_psi = psi.residual_norm;
  rep.iterations = psi.iterations;

  const auto gpsi = op.gradient(psi.values);
  const auto glp = log_gradient(op, p);
  const auto gu = potential_gradient(op, u);

  rep.I0 = rate_reversible(op, p, u, D);

  GridVectorField t = gpsi;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t i = 0; i < op.size(); ++i) t[a][i] -= gu[a][i];
  rep.J_C = op.weighted_norm2(face, t) / (4.0 * D);
  rep.I_C = rep.I0 + rep.J_C;

  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t i = 0; i < op.size(); ++i) t[a][i] = D * glp[a][i] + gpsi[a][i];
  rep.gartner = op.weighted_norm2(face, t) / (4.0 * D);
  rep.three_term = (D * D * op.weighted_norm2(face, glp) + op.weighted_norm2(face, gpsi) -
               2.0 * D * op.weighted_dot(face, b, glp)) /
              (4.0 * D);
  rep.mismatch = std::max(std::fabs(rep.I_C - rep.gartner), std::fabs(rep.gartner - rep.three_term));

  if (!c.is_zero()) {
    auto pc = op.sample(c);
    for (std::size_t a = 0; a < pc.size(); ++a)
      for (std::size_t i = 0; i < op.size(); ++i) pc[a][i] *= face[a][i];
    rep.max_div_pc = max_abs(op.gradient_transpose(pc));
    InvarianceOptions io;
    io.diffusion = D;
    rep.invariance_residual = check_invariance(c, u, torus_grid_points(u, std::min<std::size_t>(op.grid().n, 64)), io);
  }
  if (options.compute_K) {
    GaugeField xi;
    rep.K = quadratic_coefficient(op, p, c, D, &xi, options.cg);
    rep.has_K = true;
    rep.residual_xi = xi.residual_norm;
  }
  return rep;
}

RateReport rate_irreversible(const GridDensity& p, const PotentialField& u, const DriftField& c,
                             double diffusion, Discretization scheme, const RateOptions& options) {
  return rate_irreversible(FluxOperator(p.grid(), scheme), p, u, c, diffusion, options);
}

double circle_rate_closed_form(const GridDensity& p, double delta) {
  if (p.grid().dims != 1) throw ParameterError("circle closed form needs a 1D density");
  if (std::fabs(p.grid().period - 2.0 * M_PI) > 1e-12)
    throw ParameterError("circle closed form needs period 2 pi");
  const FluxOperator op(p.grid(), Discretization::spectral);
  const auto dp = op.gradient(p.values())[0];
  double fisher = 0.0, inv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    fisher += dp[i] * dp[i] / p[i];
    inv += 1.0 / p[i];
  }
  const double n = static_cast<double>(p.size());
  return fisher / (8.0 * n) + 0.5 * delta * delta * (1.0 - 1.0 / (inv / n));
}

}  // namespace irrl
