#pragma once

#include <cstddef>
#include <functional>

#include "crossvar/config.hpp"
#include "crossvar/report.hpp"

namespace crossvar::lab {

struct RunOptions {
  std::size_t workers = 1;
};

/// Runs body(i) for i in [0, count) on up to `workers` threads. Any exception
/// is rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

/// n^{2H-1} J_n(t) against the quadrature value of
/// int_0^t (s11 s21 + s12 s22) ds, with exceedance frequencies along the n grid.
/// Requires deterministic sigma.
ExperimentReport run_theorem1(const ExperimentConfig& cfg, RunOptions options = {});

/// a_n J_n(t) for diagonal sigma. Normality, variance self-consistency and the
/// comparison of the empirical scale with both candidate constants for
/// H <= 3/4; delegates to run_dyadic_cauchy for H > 3/4.
ExperimentReport run_theorem2(const ExperimentConfig& cfg, RunOptions options = {});

/// L2 Cauchy differences of the Taqqu statistic, the Rosenblatt difference
/// and n J_n across dyadic resolutions, for 3/4 < H < 1.
ExperimentReport run_dyadic_cauchy(const ExperimentConfig& cfg, RunOptions options = {});

/// a_n K_n(t) with the configured weight u; same diagnostics as theorem2 plus
/// the two-bin conditional-spread check.
ExperimentReport run_prop1(const ExperimentConfig& cfg, RunOptions options = {});

/// n^gamma sum g(k/n) (dh_{k/n})^2 against int_0^t g.
ExperimentReport run_lemma2_check(const ExperimentConfig& cfg, RunOptions options = {});

/// Log-log slopes of the two cell-integral L2 norms against n.
ExperimentReport run_lemma1_rates(const ExperimentConfig& cfg, RunOptions options = {});

ExperimentReport run_experiment(const ExperimentConfig& cfg, RunOptions options = {});

}  // namespace crossvar::lab
