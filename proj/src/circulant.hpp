#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace crossvar::fbm::detail {

// Unit-variance fractional Gaussian noise of length N.

struct CirculantEmbedding {
  std::size_t length = 0;            // N
  std::size_t size = 0;              // 2N
  bool nonnegative = true;           // all eigenvalues >= -tolerance
  double min_eigenvalue = 0.0;
  std::vector<double> scaled_root;   // sqrt(max(lambda_k, 0) / 2N)
};

struct DenseFactor {
  std::size_t length = 0;
  std::vector<double> lower;         // row-major Cholesky factor
};

/// Cached per (H, N); safe to call concurrently.
std::shared_ptr<const CirculantEmbedding> circulant_embedding(double hurst, std::size_t length);
std::shared_ptr<const DenseFactor> dense_factor(double hurst, std::size_t length);

void sample_circulant(const CirculantEmbedding& embedding, std::mt19937_64& engine,
                      std::span<double> out);
void sample_dense(const DenseFactor& factor, std::mt19937_64& engine, std::span<double> out);

}  // namespace crossvar::fbm::detail
