#include "anolab/problems.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "anolab/errors.hpp"
#include "anolab/io.hpp"

namespace anolab {
namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Quadratic::Quadratic(std::size_t dim, double condition) : condition_(condition) {
  if (dim < 1) throw DomainError("quadratic: dim must be >= 1");
  if (!(condition >= 1.0) || !std::isfinite(condition)) {
    throw DomainError("quadratic: condition must be finite and >= 1");
  }
  curvature_.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    curvature_[i] =
        dim == 1 ? 1.0 : std::pow(condition, static_cast<double>(i) / static_cast<double>(dim - 1));
  }
}

std::string Quadratic::name() const {
  std::ostringstream os;
  os << "quadratic(" << dim() << "," << condition_ << ")";
  return os.str();
}

double Quadratic::loss(std::span<const double> x) const {
  require_dim(dim(), x.size(), "quadratic loss");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += curvature_[i] * x[i] * x[i];
  return 0.5 * s;
}

void Quadratic::grad(std::span<const double> x, std::span<double> out) const {
  require_dim(dim(), x.size(), "quadratic grad");
  require_dim(dim(), out.size(), "quadratic grad output");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = curvature_[i] * x[i];
}

Rosenbrock::Rosenbrock(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw DomainError("rosenbrock: dim must be >= 2");
}

std::string Rosenbrock::name() const { return "rosenbrock(" + std::to_string(dim_) + ")"; }

double Rosenbrock::loss(std::span<const double> x) const {
  require_dim(dim_, x.size(), "rosenbrock loss");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

void Rosenbrock::grad(std::span<const double> x, std::span<double> out) const {
  require_dim(dim_, x.size(), "rosenbrock grad");
  require_dim(dim_, out.size(), "rosenbrock grad output");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    out[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
    out[i + 1] += 200.0 * a;
  }
}

std::vector<double> Rosenbrock::default_start() const {
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) x[i] = i % 2 == 0 ? -1.2 : 1.0;
  return x;
}

void Flat::grad(std::span<const double> x, std::span<double> out) const {
  require_dim(dim_, x.size(), "flat grad");
  require_dim(dim_, out.size(), "flat grad output");
  std::fill(out.begin(), out.end(), 0.0);
}

Dataset make_blobs(std::size_t n, std::size_t dim, double separation, Rng& rng) {
  if (n < 2) throw DomainError("logreg: need at least 2 samples");
  if (dim < 1) throw DomainError("logreg: dim must be >= 1");
  if (!std::isfinite(separation)) throw DomainError("logreg: separation must be finite");
  Dataset d;
  d.n = n;
  d.dim = dim;
  d.features.resize(n * dim);
  d.labels.resize(n);
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dim));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    d.labels[i] = label;
    const double shift = label == 1 ? offset : -offset;
    for (std::size_t j = 0; j < dim; ++j) d.features[i * dim + j] = normal(rng) + shift;
  }
  return d;
}

LogisticRegression::LogisticRegression(Dataset data, std::size_t batch_size)
    : data_(std::move(data)), batch_size_(batch_size) {
  if (batch_size_ < 1) throw DomainError("logreg: batch size must be >= 1");
  if (data_.features.size() != data_.n * data_.dim || data_.labels.size() != data_.n) {
    throw DimensionError("logreg: dataset arrays do not match n x dim");
  }
}

std::string LogisticRegression::name() const {
  return "logreg(" + std::to_string(data_.n) + "," + std::to_string(data_.dim) + ")";
}

double LogisticRegression::logit(std::span<const double> w, std::size_t i) const {
  const auto xi = data_.row(i);
  double z = w[data_.dim];
  for (std::size_t j = 0; j < data_.dim; ++j) z += w[j] * xi[j];
  return z;
}

double LogisticRegression::loss(std::span<const double> w) const {
  require_dim(dim(), w.size(), "logreg loss");
  double s = 0.0;
  for (std::size_t i = 0; i < data_.n; ++i) {
    const double z = logit(w, i);
    s += softplus(z) - data_.labels[i] * z;
  }
  return s / static_cast<double>(data_.n);
}

void LogisticRegression::batch_grad(std::span<const double> w,
                                    std::span<const std::size_t> indices,
                                    std::span<double> out) const {
  require_dim(dim(), w.size(), "logreg grad");
  require_dim(dim(), out.size(), "logreg grad output");
  std::fill(out.begin(), out.end(), 0.0);
  for (const std::size_t i : indices) {
    const double r = sigmoid(logit(w, i)) - data_.labels[i];
    const auto xi = data_.row(i);
    for (std::size_t j = 0; j < data_.dim; ++j) out[j] += r * xi[j];
    out[data_.dim] += r;
  }
  const double scale = 1.0 / static_cast<double>(indices.size());
  for (double& o : out) o *= scale;
}

void LogisticRegression::grad(std::span<const double> w, std::span<double> out) const {
  std::vector<std::size_t> all(data_.n);
  for (std::size_t i = 0; i < data_.n; ++i) all[i] = i;
  batch_grad(w, all, out);
}

void LogisticRegression::stochastic_grad(std::span<const double> w, Rng& rng,
                                         std::span<double> out) const {
  std::uniform_int_distribution<std::size_t> pick(0, data_.n - 1);
  std::vector<std::size_t> batch(batch_size_);
  for (auto& b : batch) b = pick(rng);
  batch_grad(w, batch, out);
}

double LogisticRegression::accuracy(std::span<const double> w) const {
  require_dim(dim(), w.size(), "logreg accuracy");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data_.n; ++i) {
    const int predicted = logit(w, i) > 0.0 ? 1 : 0;
    correct += predicted == data_.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(data_.n);
}

std::shared_ptr<const Quadratic> quadratic(std::size_t dim, double condition) {
  return std::make_shared<const Quadratic>(dim, condition);
}

std::shared_ptr<const Rosenbrock> rosenbrock(std::size_t dim) {
  return std::make_shared<const Rosenbrock>(dim);
}

std::shared_ptr<const LogisticRegression> logreg_synthetic(std::size_t n, std::size_t dim,
                                                           double separation,
                                                           std::uint64_t seed,
                                                           std::size_t batch_size) {
  Rng rng = make_stream(seed, StreamRole::kData);
  return std::make_shared<const LogisticRegression>(make_blobs(n, dim, separation, rng),
                                                    batch_size);
}

std::vector<double> inject_noise(std::span<const double> g, const NoiseModel& noise, Rng& rng) {
  std::vector<double> out(g.begin(), g.end());
  inject_noise_inplace(out, noise, rng);
  return out;
}

void inject_noise_inplace(std::span<double> g, const NoiseModel& noise, Rng& rng) {
  if (!(noise.sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
  if (noise.sigma == 0.0) return;
  std::normal_distribution<double> normal(0.0, noise.sigma);
  for (double& gi : g) gi += normal(rng);
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t j = 0; j < data.dim; ++j) out += "feature_" + std::to_string(j) + ",";
  out += "label\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (const double v : data.row(i)) out += format_double(v) + ",";
    out += std::to_string(data.labels[i]) + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace anolab
