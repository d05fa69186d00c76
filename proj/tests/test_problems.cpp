#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "anolab/errors.hpp"
#include "anolab/problems.hpp"
#include "doctest.h"

using namespace anolab;

namespace {

double fd_check(const Problem& p, std::span<const double> x, double h) {
  const auto g = p.grad(x);
  double worst = 0.0;
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xp[i];
    xp[i] = xi + h;
    const double up = p.loss(xp);
    xp[i] = xi - h;
    const double down = p.loss(xp);
    xp[i] = xi;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

}  // namespace

TEST_CASE("quadratic") {
  const Quadratic q(3, 100.0);
  CHECK(q.curvature()[0] == doctest::Approx(1.0));
  CHECK(q.curvature()[1] == doctest::Approx(10.0));
  CHECK(q.curvature()[2] == doctest::Approx(100.0));
  const std::vector<double> x{1.0, 1.0, 1.0};
  CHECK(q.loss(x) == doctest::Approx(55.5));
  const auto g = q.grad(x);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(q.loss(std::vector<double>(3, 0.0)) == 0.0);

  const Quadratic one(1, 1.0);
  CHECK(one.curvature()[0] == 1.0);
  CHECK(one.grad(std::vector{3.0})[0] == 3.0);

  CHECK_THROWS_AS(Quadratic(3, 0.5), DomainError);
  CHECK_THROWS_AS(Quadratic(0, 2.0), DomainError);
}

TEST_CASE("rosenbrock") {
  const Rosenbrock r(2);
  CHECK(r.loss(std::vector{1.0, 1.0}) == 0.0);
  const auto g = r.grad(std::vector{1.0, 1.0});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(r.loss(std::vector{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(r.default_start() == std::vector{-1.2, 1.0});
  CHECK(r.loss(r.default_start()) == doctest::Approx(24.2));
  CHECK(Rosenbrock(5).default_start() == std::vector{-1.2, 1.0, -1.2, 1.0, -1.2});
  CHECK_THROWS_AS(Rosenbrock(1), DomainError);
}

TEST_CASE("flat") {
  const Flat f(3, 2.5);
  CHECK(f.loss(std::vector{1.0, 2.0, 3.0}) == 2.5);
  CHECK(f.grad(std::vector{1.0, 2.0, 3.0}) == std::vector<double>(3, 0.0));
}

TEST_CASE("logreg basics") {
  auto p = logreg_synthetic(200, 5, 2.0, 7);
  CHECK(p->dim() == 6);
  const std::vector<double> w0(6, 0.0);
  CHECK(p->loss(w0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(p->default_start() == w0);

  const auto& data = p->data();
  int ones = 0;
  for (int y : data.labels) ones += y;
  CHECK(ones == 100);

  // Averaging singleton minibatch gradients over every sample is the full gradient.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<double> w(6);
  for (auto& wi : w) wi = n(rng);
  std::vector<double> avg(6, 0.0), one(6);
  for (std::size_t i = 0; i < data.n; ++i) {
    const std::size_t idx[] = {i};
    p->batch_grad(w, idx, one);
    for (std::size_t j = 0; j < 6; ++j) avg[j] += one[j] / static_cast<double>(data.n);
  }
  const auto full = p->grad(w);
  for (std::size_t j = 0; j < 6; ++j) CHECK(avg[j] == doctest::Approx(full[j]).epsilon(1e-12));

  CHECK(p->accuracy(w0) >= 0.0);
  CHECK(p->accuracy(w0) <= 1.0);
}

TEST_CASE("logreg with no separation cannot beat chance by much") {
  auto p = logreg_synthetic(2000, 10, 0.0, 3);
  std::vector<double> w(11, 0.0);
  for (int t = 0; t < 2000; ++t) {
    const auto g = p->grad(w);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= 0.5 * g[j];
  }
  CHECK(p->loss(w) >= std::log(2.0) - 0.01);
}

TEST_CASE("logreg is numerically stable at large logits") {
  auto p = logreg_synthetic(50, 3, 4.0, 11);
  const std::vector<double> w{1e3, 1e3, 1e3, 0.0};
  const double l = p->loss(w);
  CHECK(std::isfinite(l));
  for (double gi : p->grad(w)) CHECK(std::isfinite(gi));
}

TEST_CASE("finite-difference gradient check") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const Quadratic q(6, 50.0);
  const Rosenbrock r(6);
  auto lr = logreg_synthetic(300, 5, 2.0, 2);
  const Problem* problems[] = {&q, &r, lr.get()};
  for (const Problem* p : problems) {
    CAPTURE(p->name());
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x(p->dim());
      for (auto& xi : x) xi = n(rng);
      REQUIRE(fd_check(*p, x, 1e-5) <= 1e-6);
    }
  }
}

TEST_CASE("stochastic gradient is unbiased") {
  auto p = logreg_synthetic(500, 4, 2.0, 5);
  const std::vector<double> w{0.3, -0.2, 0.1, 0.5, -0.1};
  const auto full = p->grad(w);
  Rng rng = make_stream(9, StreamRole::kMinibatch);
  const int draws = 10000;
  std::vector<double> sum(5, 0.0), sum_sq(5, 0.0), g(5);
  for (int t = 0; t < draws; ++t) {
    p->stochastic_grad(w, rng, g);
    for (std::size_t j = 0; j < 5; ++j) {
      sum[j] += g[j];
      sum_sq[j] += g[j] * g[j];
    }
  }
  for (std::size_t j = 0; j < 5; ++j) {
    const double mean = sum[j] / draws;
    const double var = sum_sq[j] / draws - mean * mean;
    const double se = std::sqrt(var / draws);
    CHECK(std::abs(mean - full[j]) <= 4 * se);
  }
}

TEST_CASE("noise injection") {
  Rng a = make_stream(1, StreamRole::kNoise);
  Rng b = a;
  const std::vector<double> g{1.0, -2.0};
  CHECK(inject_noise(g, {0.0}, a) == g);
  CHECK(a == b);

  Rng rng = make_stream(2, StreamRole::kNoise);
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  const std::vector<double> one{1.0};
  for (int t = 0; t < draws; ++t) {
    const double z = inject_noise(one, {0.2}, rng)[0];
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / draws;
  const double var = sum_sq / draws - mean * mean;
  CHECK(mean >= 0.998);
  CHECK(mean <= 1.002);
  CHECK(var >= 0.039);
  CHECK(var <= 0.041);

  Rng r1 = make_stream(3, StreamRole::kNoise), r2 = make_stream(3, StreamRole::kNoise);
  std::vector<double> h{0.5, 0.5, 0.5};
  inject_noise_inplace(h, {0.1}, r1);
  CHECK(h == inject_noise(std::vector{0.5, 0.5, 0.5}, {0.1}, r2));
}

TEST_CASE("datasets are determined by the seed") {
  auto a = logreg_synthetic(100, 4, 2.0, 42);
  auto b = logreg_synthetic(100, 4, 2.0, 42);
  auto c = logreg_synthetic(100, 4, 2.0, 43);
  CHECK(a->data().features == b->data().features);
  CHECK(a->data().features != c->data().features);
}

TEST_CASE("streams for different roles differ") {
  Rng a = make_stream(5, StreamRole::kData);
  Rng b = make_stream(5, StreamRole::kNoise);
  CHECK(a() != b());
}

TEST_CASE("dataset csv") {
  Rng rng(1);
  const auto data = make_blobs(3, 2, 1.0, rng);
  const auto dir = std::filesystem::temp_directory_path() / "anolab_test_problems";
  std::filesystem::create_directories(dir);
  const auto path = dir / "data.csv";
  write_dataset_csv(data, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "feature_0,feature_1,label");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    int cells = 0;
    while (std::getline(ss, cell, ',')) ++cells;
    CHECK(cells == 3);
  }
  CHECK(rows == 3);
  CHECK_FALSE(std::filesystem::exists(dir / "data.csv.tmp"));
  CHECK_THROWS_AS(write_dataset_csv(data, dir / "missing" / "x.csv"), IoError);
  std::filesystem::remove_all(dir);
}
