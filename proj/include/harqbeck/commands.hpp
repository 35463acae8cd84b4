#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harqbeck/config.hpp"
#include "harqbeck/outage.hpp"
#include "harqbeck/report.hpp"

namespace harqbeck {

struct RunOptions {
  int streams = 1;        // MC shard count; results are shard-invariant
  bool grid_check = false;
  bool timing = false;    // when false runtime_ms is emitted as 0
};

// Per-SNR, per-round Monte Carlo and asymptotic outage probabilities.
SweepReport cmd_outage(const ExperimentConfig& config,
                       const RunOptions& options = {});

// Per-SNR asymptotic (and, with an mc block, Monte Carlo) LTAT.
SweepReport cmd_ltat(const ExperimentConfig& config,
                     const RunOptions& options = {});

// Per-epsilon optimized rates: variable-rate vs fixed-rate (vs grid with
// --grid-check).
SweepReport cmd_optimize(const ExperimentConfig& config,
                         const RunOptions& options = {});

struct SelftestOptions {
  std::string suite;       // empty: run all
  double delta_eq = kDeltaEq;
  std::uint64_t seed = 20240817;
};

struct SuiteResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct SelftestReport {
  std::vector<SuiteResult> suites;
  bool ok() const;
};

// Built-in invariant suites: g-oracle, symmetry, convexity, scaling,
// sampler, continuity.
SelftestReport cmd_selftest(const SelftestOptions& options = {});

}  // namespace harqbeck
