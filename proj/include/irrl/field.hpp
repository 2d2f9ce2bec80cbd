#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace irrl {

using PotentialParams = std::map<std::string, double, std::less<>>;

/// Scalar energy U with analytic gradient, on R^d or on a flat torus.
///
/// Immutable after construction. A torus is described by one period per
/// axis; an empty period list means the unbounded space R^d.
class PotentialField {
 public:
  using EnergyFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
  using LaplacianFn = std::function<double(std::span<const double>)>;

  PotentialField(std::string name, std::size_t dimension, std::vector<double> periods,
                 EnergyFn energy, GradientFn gradient, LaplacianFn laplacian = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  bool is_torus() const noexcept { return !periods_.empty(); }
  const std::vector<double>& periods() const noexcept { return periods_; }

  double energy(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> x) const;

  /// Analytic Laplacian when the catalog provides one, otherwise a central
  /// second difference with step 1e-4.
  double laplacian(std::span<const double> x) const;
  bool has_analytic_laplacian() const noexcept { return static_cast<bool>(laplacian_); }

  /// Unchecked gradient for the sampler's inner loop.
  void gradient_unchecked(std::span<const double> x, std::span<double> out) const {
    gradient_(x, out);
  }

  /// Reduce a point into the fundamental cell [0, L_i) on torus domains.
  void wrap(std::span<double> x) const noexcept;

 private:
  void check_dimension(std::size_t n) const;

  std::string name_;
  std::size_t dimension_;
  std::vector<double> periods_;
  EnergyFn energy_;
  GradientFn gradient_;
  LaplacianFn laplacian_;
};

/// Build a catalog potential by name.
///
///   quadratic     U = |z|^2 / 2                         (param: dimension, default 2)
///   bimodal1      U = (x^2-1)^2/4 + y^2/2
///   bimodal2      U = (x^2-1)^2 + (3y+x^2-1)^2/2
///   threewell     U = [(x^2-1)^2((y^2-2)^2+1) + 2y^2]/4 - y/8 + exp(-8x^2-4y^2)
///   torus-cosine  U = a cos x + b cos y on [0,2pi)^2     (params: a=1, b=0.5, period)
///   flat          U = 0 on [0,2pi)^d                     (params: dimension=1, period)
PotentialField make_potential(std::string_view name, const PotentialParams& params = {});

std::vector<std::string> potential_catalog();

}  // namespace irrl
