#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "sdmpdf/potential.hpp"
#include "test_util.hpp"

using namespace sdmpdf;
using std::numbers::pi;

namespace {

double direct_eval(const Potential& pot, const std::vector<double>& x) {
  // Sum over the stored half-lattice plus mirrored conjugates.
  std::complex<double> acc = 0.0;
  for (const auto& [k, v] : pot.half_lattice()) {
    double phase = 0.0;
    for (int d = 0; d < pot.dim(); ++d) phase += k[d] * x[d];
    acc += v * std::polar(1.0, phase) + std::conj(v) * std::polar(1.0, -phase);
  }
  return acc.real();
}

}  // namespace

TEST_CASE("sampling is a pure function of (seed, dim, cutoff)") {
  Potential a = Potential::sample(2, 3, 7, 0.25);
  Potential b = Potential::sample(2, 3, 7, 0.25);
  REQUIRE(a.half_lattice().size() == b.half_lattice().size());
  for (std::size_t i = 0; i < a.half_lattice().size(); ++i) {
    CHECK(a.half_lattice()[i].first == b.half_lattice()[i].first);
    CHECK(a.half_lattice()[i].second == b.half_lattice()[i].second);
  }
  Potential c = Potential::sample(2, 3, 8, 0.25);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.half_lattice().size(); ++i)
    any_diff = any_diff || a.half_lattice()[i].second != c.half_lattice()[i].second;
  CHECK(any_diff);
}

TEST_CASE("support: half lattice inside the cutoff disk, excluding zero") {
  Potential pot = Potential::sample(2, 5, 1, 0.25);
  // Representatives: first nonzero entry positive, 0 < |k|^2 <= R^2.
  int expected = 0;
  IndexSet cube = IndexSet::cube(2, -5, 5);
  for (const MultiIndex& k : cube)
    if (k.first_nonzero_positive() && k.squared_norm() <= 25) ++expected;
  CHECK(static_cast<int>(pot.half_lattice().size()) == expected);
  CHECK(expected == 40);
  for (const auto& [k, v] : pot.half_lattice()) {
    CHECK(k.first_nonzero_positive());
    CHECK(k.squared_norm() <= 25);
    CHECK(k.squared_norm() > 0);
  }
}

TEST_CASE("coefficient lookup mirrors conjugates and vanishes off support") {
  Potential pot = Potential::sample(2, 2, 5, 0.3);
  for (const auto& [k, v] : pot.half_lattice()) {
    CHECK(pot.coefficient(k) == v);
    CHECK(pot.coefficient(-k) == std::conj(v));
  }
  CHECK(pot.coefficient(MultiIndex({2, 2})) == std::complex<double>(0.0));  // |k|^2 = 8 > 4
  CHECK(pot.coefficient(MultiIndex::zero(2)) == std::complex<double>(0.0));
}

TEST_CASE("evaluation matches the direct mirrored sum and is real") {
  Potential pot = Potential::sample(2, 3, 9, 0.2);
  testutil::TestRng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {2 * pi * rng.unit(), 2 * pi * rng.unit()};
    CHECK(pot.eval(x) == doctest::Approx(direct_eval(pot, x)).epsilon(1e-12));
  }
}

TEST_CASE("gradient and laplacian agree with finite differences") {
  Potential pot = Potential::sample(2, 2, 11, 0.3);
  std::vector<double> x = {1.1, 4.7};
  const double h = 1e-5;
  Eigen::VectorXd g = pot.gradient(x);
  double lap_fd = 0.0;
  for (int d = 0; d < 2; ++d) {
    std::vector<double> xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    CHECK(g[d] == doctest::Approx((pot.eval(xp) - pot.eval(xm)) / (2 * h)).epsilon(1e-7));
    lap_fd += (pot.eval(xp) - 2 * pot.eval(x) + pot.eval(xm)) / (h * h);
  }
  CHECK(pot.laplacian(x) == doctest::Approx(lap_fd).epsilon(1e-5));
}

TEST_CASE("explicit coefficients: single cosine mode") {
  // V(x) = 2 cos(x) from V_1 = 1.
  Potential pot = Potential::from_coefficients(1, 1, {{MultiIndex({1}), {1.0, 0.0}}});
  for (double x : {0.0, 0.7, 2.0, 4.4}) {
    std::vector<double> xx = {x};
    CHECK(pot.eval(xx) == doctest::Approx(2 * std::cos(x)).epsilon(1e-13));
    CHECK(pot.gradient(xx)[0] == doctest::Approx(-2 * std::sin(x)).epsilon(1e-12));
    CHECK(pot.laplacian(xx) == doctest::Approx(-2 * std::cos(x)).epsilon(1e-12));
  }
}

TEST_CASE("frozen gradient and laplacian values for V = 2 cos(x1)") {
  Potential pot = Potential::from_coefficients(2, 1, {{MultiIndex({1, 0}), {1.0, 0.0}}});
  std::vector<double> x = {pi / 2, 0.0};
  Eigen::VectorXd g = pot.gradient(x);
  CHECK(g[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-13));
  std::vector<double> zero = {0.0, 0.0};
  CHECK(pot.laplacian(zero) == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("negation flips values, gradients, and coefficients") {
  Potential pot = Potential::sample(2, 2, 13, 0.4);
  Potential neg = pot.negated();
  std::vector<double> x = {0.5, 2.2};
  CHECK(neg.eval(x) == doctest::Approx(-pot.eval(x)).epsilon(1e-13));
  CHECK((neg.gradient(x) + pot.gradient(x)).norm() < 1e-13);
  for (const auto& [k, v] : pot.half_lattice()) CHECK(neg.coefficient(k) == -v);
}

TEST_CASE("grid kernels evaluate the potential and its face-centered gradients") {
  Potential pot = Potential::sample(2, 2, 15, 0.3);
  const int mesh = 12;
  std::vector<double> vals = pot.eval_grid(mesh, Exec::serial);
  std::vector<double> gx = pot.gradient_axis_grid(mesh, 0, 0.5, Exec::serial);
  REQUIRE(vals.size() == std::size_t(mesh) * mesh);
  const double h = 2 * pi / mesh;
  for (int i = 0; i < mesh; ++i)
    for (int j = 0; j < mesh; ++j) {
      std::vector<double> x = {i * h, j * h};
      CHECK(vals[i * mesh + j] == doctest::Approx(pot.eval(x)).epsilon(1e-12));
      std::vector<double> xf = {(i + 0.5) * h, j * h};
      CHECK(gx[i * mesh + j] == doctest::Approx(pot.gradient(xf)[0]).epsilon(1e-12));
    }
}

TEST_CASE("laplacian bounds: spectral bound dominates the grid maximum") {
  Potential pot = Potential::sample(2, 4, 17, 0.25);
  double grid_max = pot.max_abs_laplacian(40);
  CHECK(pot.laplacian_spectral_bound() >= grid_max);
  CHECK(grid_max > 0.0);
}

TEST_CASE("amplitude statistics match the exponential law") {
  // E|V_k| = amplitude_mean; averaging over many seeds pins the sampler's
  // scale (4-sigma band on the mean of 40 x 30 exponential draws).
  const double mean = 0.25;
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Potential pot = Potential::sample(2, 5, seed, mean);
    for (const auto& [k, v] : pot.half_lattice()) {
      acc += std::abs(v);
      ++count;
    }
  }
  double sample_mean = acc / count;
  double sigma_of_mean = mean / std::sqrt(double(count));
  CHECK(std::abs(sample_mean - mean) < 4 * sigma_of_mean);
}

TEST_CASE("phase statistics cover the circle") {
  // Mean of e^{i arg V_k} over many draws should be near zero.
  std::complex<double> acc = 0.0;
  int count = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Potential pot = Potential::sample(2, 5, seed, 0.25);
    for (const auto& [k, v] : pot.half_lattice()) {
      acc += v / std::abs(v);
      ++count;
    }
  }
  CHECK(std::abs(acc) / count < 4.0 / std::sqrt(double(count)));
}

TEST_CASE("csv and meta writers are readable") {
  Potential pot = Potential::sample(1, 2, 19, 0.2);
  pot.write_csv("potential_out.csv");
  pot.write_meta_json("potential_out.json");
  for (const char* path : {"potential_out.csv", "potential_out.json"}) {
    FILE* fp = std::fopen(path, "r");
    REQUIRE(fp != nullptr);
    std::fclose(fp);
  }
}
