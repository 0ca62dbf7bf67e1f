#include "sdmpdf/potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlohmann/json.hpp"
#include "sdmpdf/csv.hpp"
#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

namespace {

// Stateless splitmix64: counter in, well-mixed 64-bit word out.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Draw #counter for this seed, mapped to [0, 1).
double unit_draw(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(splitmix64(seed ^ (counter * 0xA0761D6478BD642FULL)) >> 11) *
         0x1.0p-53;
}

}  // namespace

void Potential::finish_init() {
  full_.clear();
  lookup_.clear();
  for (const auto& [k, v] : reps_) {
    full_.emplace_back(k, v);
    full_.emplace_back(-k, std::conj(v));
  }
  for (const auto& [k, v] : full_) lookup_[k] = v;
}

Potential Potential::sample(int dim, int cutoff, std::uint64_t seed, double amplitude_mean) {
  if (cutoff < 1) throw ConfigError("sample_potential: cutoff must be >= 1");
  if (amplitude_mean <= 0.0) throw ConfigError("sample_potential: amplitude_mean must be > 0");
  Potential p;
  p.dim_ = dim;
  p.cutoff_ = cutoff;
  p.seed_ = seed;
  p.amplitude_mean_ = amplitude_mean;
  const long long r2 = static_cast<long long>(cutoff) * cutoff;
  std::uint64_t counter = 0;
  for (const auto& k : IndexSet::cube(dim, -cutoff, cutoff)) {
    if (!k.first_nonzero_positive()) continue;  // one representative per pair
    if (k.squared_norm() > r2) continue;        // Euclidean disk
    double u1 = unit_draw(seed, counter++);
    double u2 = unit_draw(seed, counter++);
    double amp = -amplitude_mean * std::log1p(-u1);
    double phase = 2.0 * std::numbers::pi * u2;
    p.reps_.emplace_back(k, std::polar(amp, phase));
  }
  p.finish_init();
  return p;
}

Potential Potential::from_coefficients(
    int dim, int cutoff, std::vector<std::pair<MultiIndex, std::complex<double>>> half_lattice,
    std::uint64_t seed, double amplitude_mean) {
  Potential p;
  p.dim_ = dim;
  p.cutoff_ = cutoff;
  p.seed_ = seed;
  p.amplitude_mean_ = amplitude_mean;
  for (const auto& [k, v] : half_lattice) {
    if (k.dim() != dim) throw ConfigError("potential coefficient dimension mismatch");
    if (!k.first_nonzero_positive())
      throw ConfigError("potential coefficients must be given on representatives " +
                        k.to_string());
  }
  p.reps_ = std::move(half_lattice);
  p.finish_init();
  return p;
}

Potential Potential::negated() const {
  Potential p(*this);
  for (auto& [k, v] : p.reps_) v = -v;
  p.finish_init();
  return p;
}

std::complex<double> Potential::coefficient(const MultiIndex& k) const {
  auto it = lookup_.find(k);
  return it == lookup_.end() ? std::complex<double>(0.0) : it->second;
}

double Potential::eval(std::span<const double> x) const {
  // Sum over representatives: V_k e^{ikx} + conj = 2 Re(V_k e^{ikx}).
  double v = 0.0;
  for (const auto& [k, c] : reps_) {
    double arg = 0.0;
    for (int d = 0; d < dim_; ++d) arg += k[d] * x[d];
    v += 2.0 * (c * std::polar(1.0, arg)).real();
  }
  return v;
}

Eigen::VectorXd Potential::gradient(std::span<const double> x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (const auto& [k, c] : reps_) {
    double arg = 0.0;
    for (int d = 0; d < dim_; ++d) arg += k[d] * x[d];
    // d/dx_d of 2 Re(V_k e^{ikx}) = 2 Re(i k_d V_k e^{ikx})
    std::complex<double> w = std::complex<double>(0.0, 1.0) * c * std::polar(1.0, arg);
    for (int d = 0; d < dim_; ++d) g[d] += 2.0 * (double(k[d]) * w).real();
  }
  return g;
}

double Potential::laplacian(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& [k, c] : reps_) {
    double arg = 0.0;
    for (int d = 0; d < dim_; ++d) arg += k[d] * x[d];
    v -= 2.0 * static_cast<double>(k.squared_norm()) * (c * std::polar(1.0, arg)).real();
  }
  return v;
}

std::vector<double> Potential::eval_grid(int mesh, Exec exec) const {
  std::size_t total = 1;
  for (int d = 0; d < dim_; ++d) total *= static_cast<std::size_t>(mesh);
  std::vector<double> out(total);
  const double h = 2.0 * std::numbers::pi / mesh;
  const bool par = exec == Exec::parallel;
  (void)par;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    std::size_t rem = i;
    double x[8];
    for (int d = dim_ - 1; d >= 0; --d) {
      x[d] = h * static_cast<double>(rem % mesh);
      rem /= mesh;
    }
    out[i] = eval(std::span<const double>(x, dim_));
  }
  return out;
}

std::vector<double> Potential::gradient_axis_grid(int mesh, int axis, double offset_frac,
                                                  Exec exec) const {
  std::size_t total = 1;
  for (int d = 0; d < dim_; ++d) total *= static_cast<std::size_t>(mesh);
  std::vector<double> out(total);
  const double h = 2.0 * std::numbers::pi / mesh;
  const bool par = exec == Exec::parallel;
  (void)par;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    std::size_t rem = i;
    double x[8];
    for (int d = dim_ - 1; d >= 0; --d) {
      x[d] = h * static_cast<double>(rem % mesh);
      rem /= mesh;
    }
    x[axis] += offset_frac * h;
    out[i] = gradient(std::span<const double>(x, dim_))[axis];
  }
  return out;
}

double Potential::max_abs_laplacian(int mesh) const {
  std::size_t total = 1;
  for (int d = 0; d < dim_; ++d) total *= static_cast<std::size_t>(mesh);
  const double h = 2.0 * std::numbers::pi / mesh;
  double m = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    double x[8];
    for (int d = dim_ - 1; d >= 0; --d) {
      x[d] = h * static_cast<double>(rem % mesh);
      rem /= mesh;
    }
    m = std::max(m, std::abs(laplacian(std::span<const double>(x, dim_))));
  }
  return m;
}

double Potential::laplacian_spectral_bound() const {
  double s = 0.0;
  for (const auto& [k, c] : full_) s += static_cast<double>(k.squared_norm()) * std::abs(c);
  return s;
}

void Potential::write_csv(const std::string& path) const {
  std::ostringstream os;
  os << "# potential half-lattice: k1..kn,re,im\n";
  for (const auto& [k, v] : reps_) {
    os << k.join(',') << ',' << csv::g17(v.real()) << ',' << csv::g17(v.imag()) << '\n';
  }
  csv::write_file(path, os.str());
}

void Potential::write_meta_json(const std::string& path) const {
  nlohmann::json j;
  j["n"] = dim_;
  j["cutoff"] = cutoff_;
  j["seed"] = seed_;
  j["amplitude_mean"] = amplitude_mean_;
  j["half_lattice_size"] = reps_.size();
  csv::write_file(path, j.dump(2) + "\n");
}

}  // namespace sdmpdf
