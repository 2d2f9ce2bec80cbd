#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "irrl/field.hpp"

namespace irrl {

/// Constant real d x d matrix with S + S^T = 0.
class AntisymmetricMatrix {
 public:
  /// Throws ParameterError unless |S_ij + S_ji| <= 1e-15 for all i, j.
  explicit AntisymmetricMatrix(std::vector<std::vector<double>> rows);

  /// The standard symplectic matrix of R^2 extended by zeros: S_01 = 1, S_10 = -1.
  static AntisymmetricMatrix standard(std::size_t dimension = 2);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  void apply(std::span<const double> v, std::span<double> out) const noexcept;

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// Factor fields for the wedge construction C0 = grad U ^ grad V2 ^ ... .
/// Empty in d = 2, one field in d = 3.
struct WedgeRecipe {
  std::vector<PotentialField> factors;
};

enum class DriftKind { rotational, wedge, constant, custom };

/// Irreversible perturbation C(x) = delta * C0(x). Immutable.
class DriftField {
 public:
  using BaseFn = std::function<void(std::span<const double>, std::span<double>)>;

  DriftField(DriftKind kind, std::size_t dimension, double delta, BaseFn base,
             bool divergence_free, bool orthogonal_to_gradient);

  /// Arbitrary field, for tests of the invariance check. No structural guarantees.
  static DriftField custom(std::size_t dimension, BaseFn base, double delta = 1.0);

  DriftKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  double delta() const noexcept { return delta_; }

  /// Same recipe, different strength.
  DriftField with_delta(double delta) const;

  void base(std::span<const double> x, std::span<double> out) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> x) const;

  /// Unchecked evaluation for inner loops.
  void evaluate_unchecked(std::span<const double> x, std::span<double> out) const {
    if (delta_ == 0.0) {
      for (double& v : out) v = 0.0;
      return;
    }
    base_(x, out);
    for (double& v : out) v *= delta_;
  }

  bool is_zero() const noexcept { return delta_ == 0.0; }
  /// Recipe guarantees div C0 = 0 identically (exact analytic divergence).
  bool divergence_free() const noexcept { return divergence_free_; }
  /// Recipe guarantees C0 . grad U = 0 pointwise.
  bool orthogonal_to_gradient() const noexcept { return orthogonal_; }

 private:
  DriftKind kind_;
  std::size_t dimension_;
  double delta_;
  BaseFn base_;
  bool divergence_free_;
  bool orthogonal_;
};

/// C = delta * S grad U.
DriftField make_rotational_drift(const AntisymmetricMatrix& s, const PotentialField& u,
                                 double delta);

/// d = 2: C = delta * J grad U. d = 3: C = delta * (grad U x grad V2).
DriftField make_wedge_drift(const WedgeRecipe& recipe, const PotentialField& u, double delta);

/// C = delta * c for a fixed vector c. Divergence free; preserves the uniform
/// measure on a torus with flat U.
DriftField make_constant_drift(std::vector<double> direction, double delta);

struct InvarianceOptions {
  double step = 1e-4;                   ///< central-difference step for div C
  bool analytic_divergence = false;     ///< use div C = 0 when the recipe guarantees it
  double diffusion = 0.5;               ///< D; the constraint is div C = (C . grad U) / D
};

/// max over points of |div C(x) - (C(x) . grad U(x)) / D|. At D = 1/2 this is
/// the residual of div(C e^{-2U}) = 0 written as div C = 2 C . grad U.
double check_invariance(const DriftField& c, const PotentialField& u,
                        std::span<const std::vector<double>> points,
                        const InvarianceOptions& options = {});

/// Nodes of a uniform n^d grid over a torus potential's fundamental cell.
std::vector<std::vector<double>> torus_grid_points(const PotentialField& u, std::size_t n);

}  // namespace irrl
