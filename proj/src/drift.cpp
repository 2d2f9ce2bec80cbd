#include "irrl/drift.hpp"

#include <array>
#include <cmath>

#include "irrl/errors.hpp"

namespace irrl {

AntisymmetricMatrix::AntisymmetricMatrix(std::vector<std::vector<double>> rows)
    : n_(rows.size()), entries_(rows.size() * rows.size()) {
  if (n_ == 0) throw ParameterError("antisymmetric matrix must be non-empty");
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_) throw ParameterError("antisymmetric matrix must be square");
    for (std::size_t j = 0; j < n_; ++j) entries_[i * n_ + j] = rows[i][j];
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (std::abs(entries_[i * n_ + j] + entries_[j * n_ + i]) > 1e-15)
        throw ParameterError("matrix is not antisymmetric at (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
}

AntisymmetricMatrix AntisymmetricMatrix::standard(std::size_t dimension) {
  if (dimension < 2) throw ParameterError("standard antisymmetric matrix needs dimension >= 2");
  std::vector<std::vector<double>> rows(dimension, std::vector<double>(dimension, 0.0));
  rows[0][1] = 1.0;
  rows[1][0] = -1.0;
  return AntisymmetricMatrix(std::move(rows));
}

void AntisymmetricMatrix::apply(std::span<const double> v, std::span<double> out) const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += entries_[i * n_ + j] * v[j];
    out[i] = s;
  }
}

DriftField::DriftField(DriftKind kind, std::size_t dimension, double delta, BaseFn base,
                       bool divergence_free, bool orthogonal_to_gradient)
    : kind_(kind),
      dimension_(dimension),
      delta_(delta),
      base_(std::move(base)),
      divergence_free_(divergence_free),
      orthogonal_(orthogonal_to_gradient) {
  if (!std::isfinite(delta_)) throw ParameterError("drift strength must be finite");
}

DriftField DriftField::custom(std::size_t dimension, BaseFn base, double delta) {
  return DriftField(DriftKind::custom, dimension, delta, std::move(base), false, false);
}

DriftField DriftField::with_delta(double delta) const {
  DriftField copy = *this;
  if (!std::isfinite(delta)) throw ParameterError("drift strength must be finite");
  copy.delta_ = delta;
  return copy;
}

void DriftField::base(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dimension_ || out.size() != dimension_)
    throw ParameterError("drift dimension mismatch");
  base_(x, out);
}

void DriftField::evaluate(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dimension_ || out.size() != dimension_)
    throw ParameterError("drift dimension mismatch");
  evaluate_unchecked(x, out);
}

std::vector<double> DriftField::evaluate(std::span<const double> x) const {
  std::vector<double> out(dimension_);
  evaluate(x, out);
  return out;
}

DriftField make_rotational_drift(const AntisymmetricMatrix& s, const PotentialField& u,
                                 double delta) {
  const std::size_t d = u.dimension();
  if (s.size() != d) throw ParameterError("antisymmetric matrix and potential dimension differ");
  auto base = [s, u](std::span<const double> x, std::span<double> out) {
    constexpr std::size_t kStack = 8;
    if (x.size() <= kStack) {
      std::array<double, kStack> g;
      const std::span<double> gs(g.data(), x.size());
      u.gradient_unchecked(x, gs);
      s.apply(gs, out);
    } else {
      std::vector<double> g(x.size());
      u.gradient_unchecked(x, g);
      s.apply(g, out);
    }
  };
  return DriftField(DriftKind::rotational, d, delta, std::move(base), true, true);
}

DriftField make_wedge_drift(const WedgeRecipe& recipe, const PotentialField& u, double delta) {
  const std::size_t d = u.dimension();
  if (d == 2) {
    if (!recipe.factors.empty()) throw ParameterError("wedge recipe in d = 2 takes no factor fields");
    DriftField c = make_rotational_drift(AntisymmetricMatrix::standard(2), u, delta);
    return DriftField(DriftKind::wedge, 2, delta,
                      [c](std::span<const double> x, std::span<double> out) { c.base(x, out); },
                      true, true);
  }
  if (d != 3) throw ParameterError("wedge drift is supported only in dimension 2 or 3");
  if (recipe.factors.size() != 1 || recipe.factors[0].dimension() != 3)
    throw ParameterError("wedge recipe in d = 3 needs exactly one 3-dimensional factor field");
  const PotentialField v = recipe.factors[0];
  auto base = [u, v](std::span<const double> x, std::span<double> out) {
    double gu[3], gv[3];
    u.gradient_unchecked(x, gu);
    v.gradient_unchecked(x, gv);
    out[0] = gu[1] * gv[2] - gu[2] * gv[1];
    out[1] = gu[2] * gv[0] - gu[0] * gv[2];
    out[2] = gu[0] * gv[1] - gu[1] * gv[0];
  };
  return DriftField(DriftKind::wedge, 3, delta, std::move(base), true, true);
}

DriftField make_constant_drift(std::vector<double> direction, double delta) {
  if (direction.empty()) throw ParameterError("constant drift needs a direction");
  const std::size_t d = direction.size();
  auto base = [c = std::move(direction)](std::span<const double>, std::span<double> out) {
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
  };
  return DriftField(DriftKind::constant, d, delta, std::move(base), true, false);
}

double check_invariance(const DriftField& c, const PotentialField& u,
                        std::span<const std::vector<double>> points,
                        const InvarianceOptions& options) {
  const std::size_t d = u.dimension();
  if (c.dimension() != d) throw ParameterError("drift and potential dimension differ");
  if (!(options.diffusion > 0.0)) throw ParameterError("diffusion must be positive");
  if (c.is_zero()) return 0.0;
  const double h = options.step;
  std::vector<double> y(d), cp(d), cm(d), cx(d), g(d);
  double worst = 0.0;
  for (const auto& x : points) {
    if (x.size() != d) throw ParameterError("point dimension mismatch");
    double div = 0.0;
    if (!(options.analytic_divergence && c.divergence_free())) {
      y = x;
      for (std::size_t i = 0; i < d; ++i) {
        y[i] = x[i] + h;
        c.evaluate_unchecked(y, cp);
        y[i] = x[i] - h;
        c.evaluate_unchecked(y, cm);
        y[i] = x[i];
        div += (cp[i] - cm[i]) / (2.0 * h);
      }
    }
    c.evaluate_unchecked(x, cx);
    u.gradient_unchecked(x, g);
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += cx[i] * g[i];
    worst = std::max(worst, std::abs(div - dot / options.diffusion));
  }
  return worst;
}

std::vector<std::vector<double>> torus_grid_points(const PotentialField& u, std::size_t n) {
  if (!u.is_torus()) throw ParameterError("grid points need a torus potential");
  if (n == 0) throw ParameterError("grid size must be positive");
  const std::size_t d = u.dimension();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= n;
  std::vector<std::vector<double>> pts(total, std::vector<double>(d));
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    for (std::size_t i = d; i-- > 0;) {
      pts[k][i] = static_cast<double>(rem % n) * u.periods()[i] / static_cast<double>(n);
      rem /= n;
    }
  }
  return pts;
}

}  // namespace irrl
