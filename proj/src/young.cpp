#include "crossvar/young.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossvar/errors.hpp"

namespace crossvar::young {

double young_constant(double alpha, double gamma) {
  const double s = alpha + gamma - 1.0;
  if (!(s > 0.0)) {
    throw DivergentSeries("C_{alpha,gamma} diverges for alpha + gamma = " +
                          std::to_string(alpha + gamma) + " <= 1");
  }
  return 1.0 / (2.0 * (std::exp2(s) - 1.0));
}

fbm::SamplePath young_integrate(const fbm::SamplePath& f, const fbm::SamplePath& g) {
  fbm::require_same_grid(f, g, "young_integrate");
  const std::size_t n = f.intervals();
  std::vector<double> out(n + 1, 0.0);
  std::size_t run_start = 0;
  double base = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (f[k - 1] != f[run_start]) {
      run_start = k - 1;
      base = out[k - 1];
    }
    out[k] = base + f[run_start] * (g[k] - g[run_start]);
  }
  fbm::PathMeta meta = g.meta();
  meta.generator = "young-left-sum";
  return fbm::SamplePath(f.horizon(), std::move(out), std::move(meta));
}

RemainderReport young_remainder_check(const fbm::SamplePath& f, const fbm::SamplePath& g,
                                      std::size_t a, std::size_t b, double alpha, double gamma,
                                      std::optional<double> f_norm, std::optional<double> g_norm) {
  fbm::require_same_grid(f, g, "young_remainder_check");
  if (!(a < b) || b > f.intervals()) throw std::invalid_argument("young_remainder_check: need a < b <= N");

  RemainderReport r;
  r.constant = young_constant(alpha, gamma);
  double sum = 0.0;
  const double fa = f[a];
  for (std::size_t j = a; j < b; ++j) sum += (f[j] - fa) * (g[j + 1] - g[j]);
  r.lhs = std::abs(sum);
  r.f_norm = f_norm ? *f_norm : fbm::holder_norm(f, alpha, a, b);
  r.g_norm = g_norm ? *g_norm : fbm::holder_norm(g, gamma, a, b);
  const double width = f.time(b) - f.time(a);
  r.rhs = r.constant * r.f_norm * r.g_norm * std::pow(width, alpha + gamma);
  r.ratio = r.lhs == 0.0 ? 0.0 : r.lhs / r.rhs;
  return r;
}

}  // namespace crossvar::young
