#pragma once

// Truncation-convergence diagnostics: integrate the same initial data at a
// ladder of cutoffs and watch individual matrix entries settle.

#include <algorithm>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "jcsim/evolve.hpp"

namespace jcsim {

struct ProbeEntry {
  BasisIndex row;
  BasisIndex col;

  /// e.g. "0+;1-"
  std::string label() const {
    return std::to_string(row.n) + to_char(row.s) + ";" + std::to_string(col.n) + to_char(col.s);
  }
};

struct SweepPlan {
  ModelSpec model;  // nu is ignored
  std::vector<int> levels;
  std::vector<ProbeEntry> probes;
  std::vector<double> probe_times;
  IntegratorConfig integrator;
  double threshold = 1e-6;
};

struct ConvergenceRow {
  ProbeEntry entry;
  double t = 0.0;
  std::vector<int> levels;
  std::vector<Complex> values;  // one per level
  std::vector<double> diffs;    // |value[k] - value[k+1]|
  bool strictly_decreasing = false;
  bool converging = false;  // last diff is the smallest and <= threshold
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double threshold = 1e-6;

  bool all_converging() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converging; });
  }
};

/// Builds the initial state at a given level.
using StateFactory = std::function<DensityMatrix(TruncationLevel)>;

/// Headroom above the largest level at which the common reference state is built.
inline constexpr int kReferenceHeadroom = 16;

/// ||truncate(reference, nu)||_HS for each level; nondecreasing and bounded by ||reference||.
inline std::vector<double> truncation_norms(const DensityMatrix& reference, const std::vector<int>& levels) {
  std::vector<double> out;
  out.reserve(levels.size());
  for (int nu : levels) out.push_back(truncate(reference, TruncationLevel(nu)).hs_norm());
  return out;
}

namespace detail {

inline void validate_plan(const SweepPlan& plan) {
  if (plan.levels.empty()) throw PreconditionError("sweep.levels must be nonempty");
  for (std::size_t k = 0; k < plan.levels.size(); ++k) {
    if (plan.levels[k] < 1) throw PreconditionError("sweep.levels must be >= 1");
    if (k > 0 && plan.levels[k] <= plan.levels[k - 1]) {
      throw PreconditionError("sweep.levels must be strictly increasing");
    }
  }
  const int smallest = plan.levels.front();
  for (const auto& p : plan.probes) {
    if (p.row.n < 0 || p.col.n < 0 || p.row.n > smallest || p.col.n > smallest) {
      throw PreconditionError("probe entry " + p.label() + " lies outside the smallest level " +
                              std::to_string(smallest));
    }
  }
  if (plan.probe_times.empty()) throw PreconditionError("sweep.probe_times must be nonempty");
  for (double t : plan.probe_times) {
    if (!(t >= 0.0)) throw PreconditionError("sweep.probe_times must be >= 0");
  }
  if (!(plan.integrator.dt > 0.0)) throw PreconditionError("integrator.dt must be > 0");
}

// Probe values at one level, indexed [time][probe].
inline std::vector<std::vector<Complex>> run_level(const SweepPlan& plan, const DensityMatrix& reference,
                                                   const std::vector<double>& times, int level) {
  try {
    const TruncationLevel nu(level);
    const ModelSpec model = plan.model.at_level(nu);
    DensityMatrix rho = truncate(reference, nu);
    double t_now = 0.0;
    std::vector<std::vector<Complex>> out;
    for (double t : times) {
      rho = propagate(model, rho, t_now, t, plan.integrator);
      t_now = t;
      std::vector<Complex> row;
      for (const auto& p : plan.probes) row.push_back(rho(p.row, p.col));
      out.push_back(std::move(row));
    }
    return out;
  } catch (const IntegrationError& e) {
    throw IntegrationError("level nu=" + std::to_string(level) + ": " + e.what(), e.t_reached());
  } catch (const Error& e) {
    throw Error("level nu=" + std::to_string(level) + ": " + e.what());
  }
}

}  // namespace detail

/// Runs the plan at every level and tabulates the probe entries.
///
/// The initial state is built once by `initial` at max(levels) + 16 and
/// truncated down to each level, so every level sees compatible data.
/// Levels are integrated concurrently; the merge is ordered by level.
/// The "converging" verdict is a heuristic on finitely many levels.
inline ConvergenceTable sweep(const SweepPlan& plan, const StateFactory& initial) {
  detail::validate_plan(plan);
  const DensityMatrix reference = initial(TruncationLevel(plan.levels.back() + kReferenceHeadroom));

  std::vector<double> times = plan.probe_times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<std::future<std::vector<std::vector<Complex>>>> jobs;
  for (int level : plan.levels) {
    jobs.push_back(std::async(std::launch::async, [&plan, &reference, &times, level] {
      return detail::run_level(plan, reference, times, level);
    }));
  }
  std::vector<std::vector<std::vector<Complex>>> per_level;
  for (auto& j : jobs) per_level.push_back(j.get());

  ConvergenceTable table;
  table.threshold = plan.threshold;
  for (std::size_t p = 0; p < plan.probes.size(); ++p) {
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      ConvergenceRow row;
      row.entry = plan.probes[p];
      row.t = times[ti];
      row.levels = plan.levels;
      for (const auto& lv : per_level) row.values.push_back(lv[ti][p]);
      for (std::size_t k = 0; k + 1 < row.values.size(); ++k) {
        row.diffs.push_back(std::abs(row.values[k] - row.values[k + 1]));
      }
      row.strictly_decreasing = true;
      for (std::size_t k = 1; k < row.diffs.size(); ++k) {
        if (!(row.diffs[k] < row.diffs[k - 1])) row.strictly_decreasing = false;
      }
      if (row.diffs.empty()) {
        row.converging = false;
      } else {
        const double last = row.diffs.back();
        row.converging = last <= plan.threshold && last <= *std::min_element(row.diffs.begin(), row.diffs.end());
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace jcsim
