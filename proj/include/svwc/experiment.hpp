#pragma once

#include "svwc/beam_mgmt.hpp"
#include "svwc/config.hpp"
#include "svwc/random.hpp"
#include "svwc/stats.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace svwc::harness {

using svwc::DeriveSeed;

struct SummaryRow
{
  std::string scheme;
  /// grouping value (density for assoc, mobile count for rach), empty for beam
  std::string group;
  std::string metric;
  stats::SummaryStats stats;
};

struct ExperimentResult
{
  std::string csv;
  std::vector<SummaryRow> summaries;
};

/// A trial threw; carries the trial index and its derived seed.
class TrialError : public std::runtime_error
{
public:
  TrialError (const std::string& what, long trial, std::uint64_t seed)
    : std::runtime_error (what),
      m_trial (trial),
      m_seed (seed)
  {
  }
  long Trial () const { return m_trial; }
  std::uint64_t Seed () const { return m_seed; }

private:
  long m_trial;
  std::uint64_t m_seed;
};

/**
 * Calls fn(i) for every i in [0, n) on `workers` threads (0 = hardware
 * concurrency). Work is handed out through a shared atomic counter. If any
 * call throws, the exception from the lowest index is rethrown after all
 * workers have stopped.
 */
void ParallelFor (std::size_t n, int workers, const std::function<void (std::size_t)>& fn);

/// Beam-experiment parameters; runs the noise calibration when enabled.
beam::BeamConfig MakeBeamConfig (const ExperimentConfig& cfg);

std::vector<std::string> SchemeList (const ExperimentConfig& cfg);

/// Runs every trial of every scheme; the CSV is identical for any worker count.
ExperimentResult RunExperiment (const ExperimentConfig& cfg);

/// CSV rows (no header) produced by trial `trial` alone, for re-running a
/// single trial from its derived seed.
std::string RunTrialRows (const ExperimentConfig& cfg, long trial);

std::string SummariesCsv (const std::vector<SummaryRow>& rows);

} // namespace svwc::harness
