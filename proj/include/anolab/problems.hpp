#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "anolab/rng.hpp"

namespace anolab {

/// A differentiable objective with an exact gradient and a stochastic
/// gradient oracle. Immutable after construction; anything random comes from
/// the caller's generator.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual double loss(std::span<const double> x) const = 0;
  /// Writes the exact gradient at x into `out` (length dim()).
  virtual void grad(std::span<const double> x, std::span<double> out) const = 0;
  /// Defaults to the exact gradient for deterministic problems.
  virtual void stochastic_grad(std::span<const double> x, Rng& rng, std::span<double> out) const {
    (void)rng;
    grad(x, out);
  }
  /// Conventional starting point.
  virtual std::vector<double> default_start() const { return std::vector<double>(dim(), 1.0); }

  std::vector<double> grad(std::span<const double> x) const {
    std::vector<double> out(dim());
    grad(x, out);
    return out;
  }
};

using ProblemPtr = std::shared_ptr<const Problem>;

/// f(x) = 0.5 * sum_i d_i x_i^2 with d_i log-spaced in [1, condition].
class Quadratic final : public Problem {
 public:
  Quadratic(std::size_t dim, double condition);

  std::size_t dim() const override { return curvature_.size(); }
  std::string name() const override;
  double loss(std::span<const double> x) const override;
  void grad(std::span<const double> x, std::span<double> out) const override;
  using Problem::grad;

  const std::vector<double>& curvature() const noexcept { return curvature_; }

 private:
  double condition_;
  std::vector<double> curvature_;
};

/// Chained Rosenbrock: sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
/// Starts at (-1.2, 1, -1.2, 1, ...).
class Rosenbrock final : public Problem {
 public:
  explicit Rosenbrock(std::size_t dim);

  std::size_t dim() const override { return dim_; }
  std::string name() const override;
  double loss(std::span<const double> x) const override;
  void grad(std::span<const double> x, std::span<double> out) const override;
  using Problem::grad;
  std::vector<double> default_start() const override;

 private:
  std::size_t dim_;
};

/// Constant objective; the gradient is identically zero.
class Flat final : public Problem {
 public:
  explicit Flat(std::size_t dim, double value = 0.0) : dim_(dim), value_(value) {}

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "flat"; }
  double loss(std::span<const double>) const override { return value_; }
  void grad(std::span<const double> x, std::span<double> out) const override;
  using Problem::grad;

 private:
  std::size_t dim_;
  double value_;
};

/// Binary classification data: row-major features (n x dim) and 0/1 labels.
struct Dataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
};

/// Two unit-variance Gaussian blobs centred at +-(separation / 2) * u,
/// u = (1, ..., 1) / sqrt(dim). Labels alternate 0, 1, 0, ... so the classes
/// are balanced.
Dataset make_blobs(std::size_t n, std::size_t dim, double separation, Rng& rng);

/// Mean binary cross-entropy of a linear model with bias. Parameters are the
/// dim weights followed by the bias. The stochastic gradient averages over a
/// minibatch drawn uniformly with replacement.
class LogisticRegression final : public Problem {
 public:
  LogisticRegression(Dataset data, std::size_t batch_size);

  std::size_t dim() const override { return data_.dim + 1; }
  std::string name() const override;
  double loss(std::span<const double> w) const override;
  void grad(std::span<const double> w, std::span<double> out) const override;
  using Problem::grad;
  void stochastic_grad(std::span<const double> w, Rng& rng, std::span<double> out) const override;
  std::vector<double> default_start() const override { return std::vector<double>(dim(), 0.0); }

  /// Gradient of the loss on the given sample indices (duplicates allowed).
  void batch_grad(std::span<const double> w, std::span<const std::size_t> indices,
                  std::span<double> out) const;
  /// Fraction of samples classified correctly (threshold 0.5).
  double accuracy(std::span<const double> w) const;

  const Dataset& data() const noexcept { return data_; }
  std::size_t batch_size() const noexcept { return batch_size_; }

 private:
  double logit(std::span<const double> w, std::size_t i) const;

  Dataset data_;
  std::size_t batch_size_;
};

std::shared_ptr<const Quadratic> quadratic(std::size_t dim, double condition);
std::shared_ptr<const Rosenbrock> rosenbrock(std::size_t dim);
/// Draws the dataset from the kData stream of `seed`.
std::shared_ptr<const LogisticRegression> logreg_synthetic(std::size_t n, std::size_t dim,
                                                           double separation,
                                                           std::uint64_t seed,
                                                           std::size_t batch_size = 32);

/// i.i.d. Gaussian gradient perturbation, N(0, sigma^2) per coordinate.
struct NoiseModel {
  double sigma = 0.0;
};

/// g + z with z_i ~ N(0, sigma^2). sigma == 0 returns g unchanged and draws
/// nothing from `rng`.
std::vector<double> inject_noise(std::span<const double> g, const NoiseModel& noise, Rng& rng);
void inject_noise_inplace(std::span<double> g, const NoiseModel& noise, Rng& rng);

/// CSV with header feature_0..feature_{d-1},label. Throws IoError.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace anolab
