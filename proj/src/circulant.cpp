#include "circulant.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "crossvar/errors.hpp"
#include "crossvar/fbm.hpp"

namespace crossvar::fbm::detail {
namespace {

using Complex = std::complex<double>;

// The FFTW planner is not reentrant; executing a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan forward_plan(std::size_t size) {
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  auto it = plans.find(size);
  if (it != plans.end()) return it->second;
  std::vector<Complex> scratch(size);
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(size), data, data, FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw: cannot create plan");
  plans.emplace(size, plan);
  return plan;
}

void forward_fft(std::vector<Complex>& data) {
  fftw_plan plan = forward_plan(data.size());
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

using Key = std::pair<std::uint64_t, std::size_t>;

Key make_key(double hurst, std::size_t length) {
  return {std::bit_cast<std::uint64_t>(hurst), length};
}

template <typename T, typename Build>
std::shared_ptr<const T> cached(std::map<Key, std::shared_ptr<const T>>& cache, std::mutex& m,
                                Key key, Build&& build) {
  {
    std::lock_guard lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto value = std::make_shared<const T>(build());
  std::lock_guard lock(m);
  return cache.emplace(key, std::move(value)).first->second;
}

CirculantEmbedding build_embedding(double hurst, std::size_t length) {
  const Hurst h(hurst);
  CirculantEmbedding e;
  e.length = length;
  e.size = 2 * length;
  std::vector<Complex> row(e.size);
  for (std::size_t j = 0; j < e.size; ++j) {
    const std::size_t lag = std::min(j, e.size - j);
    row[j] = fgn_autocovariance(h, static_cast<long long>(lag));
  }
  forward_fft(row);

  double max_eig = 0.0;
  e.min_eigenvalue = row[0].real();
  for (const auto& c : row) {
    max_eig = std::max(max_eig, c.real());
    e.min_eigenvalue = std::min(e.min_eigenvalue, c.real());
  }
  // Round-off leaves eigenvalues of order 1e-16 * max slightly negative.
  e.nonnegative = e.min_eigenvalue >= -1e-10 * max_eig;
  e.scaled_root.resize(e.size);
  const double inv = 1.0 / static_cast<double>(e.size);
  for (std::size_t k = 0; k < e.size; ++k) {
    e.scaled_root[k] = std::sqrt(std::max(row[k].real(), 0.0) * inv);
  }
  return e;
}

DenseFactor build_dense(double hurst, std::size_t length) {
  if (length > kDenseLimit) {
    throw std::invalid_argument("dense fBm factorization limited to N <= " +
                                std::to_string(kDenseLimit));
  }
  const Hurst h(hurst);
  DenseFactor f;
  f.length = length;
  f.lower.assign(length * length, 0.0);
  std::vector<double> rho(length);
  for (std::size_t r = 0; r < length; ++r) rho[r] = fgn_autocovariance(h, static_cast<long long>(r));

  auto at = [&](std::size_t i, std::size_t j) -> double& { return f.lower[i * length + j]; };
  for (std::size_t j = 0; j < length; ++j) {
    double diag = rho[0];
    for (std::size_t k = 0; k < j; ++k) diag -= at(j, k) * at(j, k);
    if (!(diag > 0.0)) throw std::runtime_error("fGn covariance is not positive definite");
    const double ljj = std::sqrt(diag);
    at(j, j) = ljj;
    for (std::size_t i = j + 1; i < length; ++i) {
      double s = rho[i - j];
      for (std::size_t k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
      at(i, j) = s / ljj;
    }
  }
  return f;
}

}  // namespace

std::shared_ptr<const CirculantEmbedding> circulant_embedding(double hurst, std::size_t length) {
  static std::map<Key, std::shared_ptr<const CirculantEmbedding>> cache;
  static std::mutex m;
  return cached(cache, m, make_key(hurst, length), [&] { return build_embedding(hurst, length); });
}

std::shared_ptr<const DenseFactor> dense_factor(double hurst, std::size_t length) {
  static std::map<Key, std::shared_ptr<const DenseFactor>> cache;
  static std::mutex m;
  return cached(cache, m, make_key(hurst, length), [&] { return build_dense(hurst, length); });
}

// With W_k = sqrt(lambda_k / 2N) (a_k + i b_k) and a, b iid N(0,1), the real
// part of the DFT of W has covariance equal to the circulant row, so its first
// N entries are exact fGn.
void sample_circulant(const CirculantEmbedding& embedding, std::mt19937_64& engine,
                      std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> w(embedding.size);
  for (std::size_t k = 0; k < embedding.size; ++k) {
    const double a = normal(engine);
    const double b = normal(engine);
    w[k] = embedding.scaled_root[k] * Complex(a, b);
  }
  forward_fft(w);
  for (std::size_t j = 0; j < embedding.length; ++j) out[j] = w[j].real();
}

void sample_dense(const DenseFactor& factor, std::mt19937_64& engine, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = factor.length;
  std::vector<double> z(n);
  for (auto& v : z) v = normal(engine);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = factor.lower.data() + i * n;
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    out[i] = s;
  }
}

}  // namespace crossvar::fbm::detail
