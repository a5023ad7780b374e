#include "svwc/experiment.hpp"

#include "svwc/cell_assoc.hpp"
#include "svwc/csv.hpp"
#include "svwc/rach.hpp"
#include "svwc/sensing.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <tuple>
#include <mutex>
#include <thread>

namespace svwc::harness {

namespace {

const std::vector<std::string> kBeamHeader{"scheme",    "trial",       "seed",       "pos_error_m", "az_err_deg",
                                           "el_err_deg", "array_gain", "latency_ms", "fallback"};
const std::vector<std::string> kAssocHeader{"density",  "scheme",    "trial",
                                            "mean_rate_bps", "handovers", "interruption_ms_total"};
const std::vector<std::string> kRachHeader{"scheme", "n_mobiles",       "n_ssb", "trial",
                                           "mean_latency_ms", "p95_latency_ms", "rounds", "first_round_collision_rate"};

// Everything a trial needs that is shared read-only between workers.
struct Prepared
{
  ExperimentConfig cfg;
  std::vector<std::string> schemes;
  beam::BeamConfig beamCfg;
  std::optional<phy::Codebook> codebook;
  geometry::Scene beamScene;
};

Prepared
Prepare (const ExperimentConfig& cfg)
{
  ValidateConfig (cfg);
  Prepared p{cfg, SchemeList (cfg), {}, std::nullopt, {}};
  if (cfg.experiment == ExperimentKind::beam)
    {
      p.beamCfg = MakeBeamConfig (cfg);
      p.codebook = phy::DftCodebook (cfg.bs_upa, 4);
      p.beamScene.area = cfg.scene.area;
      p.beamScene.bs_poses = {p.beamCfg.rig.bs_pose};
    }
  return p;
}

// (scheme, group, metric, value)
using MetricSink = std::vector<std::tuple<std::string, std::string, std::string, double>>;

// Rows of a writer without its header line.
std::string
Body (const csv::Writer& w)
{
  const std::string& text = w.Text ();
  return text.substr (text.find ('\n') + 1);
}

std::string
BeamRows (const Prepared& p, long trial, MetricSink& sink)
{
  const std::uint64_t seed = DeriveSeed (p.cfg.seed, static_cast<std::uint64_t> (trial));
  csv::Writer w (kBeamHeader);
  for (const auto& name : p.schemes)
    {
      const auto scheme = *beam::ParseBeamScheme (name);
      Rng rng (seed);
      const auto rec = beam::RunBeamTrial (p.beamScene, scheme, p.beamCfg, p.cfg.channel, *p.codebook, rng);
      w.Field (name)
          .Field (static_cast<std::int64_t> (trial))
          .Field (seed)
          .Field (rec.pos_error_m)
          .Field (rec.az_err_deg)
          .Field (rec.el_err_deg)
          .Field (rec.array_gain)
          .Field (rec.latency_ms)
          .Field (rec.fallback);
      w.EndRow ();
      sink.emplace_back (name, "", "array_gain", rec.array_gain);
      sink.emplace_back (name, "", "pos_error_m", rec.pos_error_m);
      sink.emplace_back (name, "", "latency_ms", rec.latency_ms);
      // the population the detector's positioning error is defined over
      if (!rec.fallback)
        {
          sink.emplace_back (name, "", "array_gain_sensed", rec.array_gain);
          sink.emplace_back (name, "", "pos_error_sensed_m", rec.pos_error_m);
        }
    }
  return Body (w);
}

std::string
AssocRows (const Prepared& p, double density, long trial, MetricSink& sink)
{
  const std::uint64_t seed = DeriveSeed (p.cfg.seed, static_cast<std::uint64_t> (trial));
  std::vector<assoc::AssocScheme> schemes;
  for (const auto& name : p.schemes)
    {
      schemes.push_back (*assoc::ParseAssocScheme (name));
    }
  const auto results =
      assoc::RunAssocTrial (density, schemes, seed, p.cfg.assoc, p.cfg.scene, p.cfg.channel, p.cfg.predictor);
  csv::Writer w (kAssocHeader);
  for (const auto& r : results)
    {
      const std::string name (assoc::ToString (r.scheme));
      w.Field (density)
          .Field (name)
          .Field (static_cast<std::int64_t> (trial))
          .Field (r.mean_rate_bps)
          .Field (r.handovers)
          .Field (r.interruption_ms_total);
      w.EndRow ();
      sink.emplace_back (name, csv::FormatDouble (density), "mean_rate_bps", r.mean_rate_bps);
      sink.emplace_back (name, csv::FormatDouble (density), "handovers", r.handovers);
    }
  return Body (w);
}

std::string
RachRows (const Prepared& p, long trial, MetricSink& sink)
{
  const std::uint64_t seed = DeriveSeed (p.cfg.seed, static_cast<std::uint64_t> (trial));
  csv::Writer w (kRachHeader);
  const std::string group = std::to_string (p.cfg.rach_mobiles);
  for (const auto& name : p.schemes)
    {
      const auto scheme = *rach::ParseRachScheme (name);
      Rng rng (seed);
      const auto out =
          rach::SimulateRach (p.cfg.rach_mobiles, p.cfg.placement, scheme, p.cfg.rach, p.cfg.sensing.count_noise, rng);
      const double mean = out.MeanLatencyMs ();
      const double p95 = stats::Percentile (out.latency_ms, 0.95);
      w.Field (name)
          .Field (p.cfg.rach_mobiles)
          .Field (p.cfg.rach.n_ssb)
          .Field (static_cast<std::int64_t> (trial))
          .Field (mean)
          .Field (p95)
          .Field (out.rounds_used)
          .Field (out.FirstRoundCollisionRate ());
      w.EndRow ();
      sink.emplace_back (name, group, "mean_latency_ms", mean);
      sink.emplace_back (name, group, "p95_latency_ms", p95);
    }
  return Body (w);
}

const std::vector<std::string>&
Header (ExperimentKind k)
{
  switch (k)
    {
    case ExperimentKind::beam:
      return kBeamHeader;
    case ExperimentKind::assoc:
      return kAssocHeader;
    case ExperimentKind::rach:
      return kRachHeader;
    }
  throw std::logic_error ("unknown experiment kind");
}

std::string
JoinHeader (const std::vector<std::string>& header)
{
  std::string line;
  for (std::size_t i = 0; i < header.size (); ++i)
    {
      line += (i ? "," : "") + header[i];
    }
  return line + "\n";
}

// One unit of work: a trial index, or (density, trial) for association.
struct Unit
{
  double density = 0.0;
  long trial = 0;
};

std::string
RunUnit (const Prepared& p, const Unit& u, MetricSink& sink)
{
  try
    {
      switch (p.cfg.experiment)
        {
        case ExperimentKind::beam:
          return BeamRows (p, u.trial, sink);
        case ExperimentKind::assoc:
          return AssocRows (p, u.density, u.trial, sink);
        case ExperimentKind::rach:
          return RachRows (p, u.trial, sink);
        }
    }
  catch (const std::exception& e)
    {
      const std::uint64_t seed = DeriveSeed (p.cfg.seed, static_cast<std::uint64_t> (u.trial));
      throw TrialError ("trial " + std::to_string (u.trial) + " (seed " + std::to_string (seed) + "): " + e.what (),
                        u.trial, seed);
    }
  throw std::logic_error ("unknown experiment kind");
}

sensing::SensingNoise
BaseNoise (const DetectorSettings& d)
{
  sensing::SensingNoise n;
  n.recall = d.recall;
  n.precision = d.precision;
  n.fp_rate = sensing::FpRateForPrecision (d.precision, d.recall);
  n.pixel_sigma = d.pixel_sigma;
  n.depth_sigma = d.depth_sigma_m;
  return n;
}

} // namespace

std::vector<std::string>
SchemeList (const ExperimentConfig& cfg)
{
  if (!cfg.schemes.empty ())
    {
      return cfg.schemes;
    }
  switch (cfg.experiment)
    {
    case ExperimentKind::beam:
      return {"nr_two_step", "svwc_single_view", "svwc_multi_view", "svwc_efficientdet_like", "prs_localization"};
    case ExperimentKind::assoc:
      return {"reactive", "trend", "svwc"};
    case ExperimentKind::rach:
      return {"uniform", "svwc_density"};
    }
  return {};
}

beam::BeamConfig
MakeBeamConfig (const ExperimentConfig& cfg)
{
  const auto& s = cfg.sensing;
  beam::BeamConfig b;
  b.rig.bs_pose = geometry::Pose ({0.0, cfg.scene.area.depth / 2.0, cfg.scene.bs_height}, 0.0,
                                  cfg.scene.bs_downtilt_rad);
  b.rig.baseline_m = s.baseline_m;
  b.rig.h_fov = sensing::DegToRad (s.h_fov_deg);
  b.rig.v_fov = sensing::DegToRad (s.v_fov_deg);
  b.rig.max_range = s.max_range_m;
  b.rig.mobile_height = cfg.scene.mobile_height;
  b.rig.tau_assoc = s.tau_assoc_m;
  b.rig.match_gate = s.match_gate_m;
  b.bs_upa = cfg.bs_upa;
  b.ue_upa = cfg.ue_upa;
  b.latency = cfg.latency;
  b.prs_sigma_m = sensing::PrsSigmaForMeanError (s.prs_target_error_cm / 100.0);

  b.single_view = BaseNoise (s.single_view);
  b.multi_view = BaseNoise (s.multi_view);
  b.efficientdet = BaseNoise (s.efficientdet);
  if (!s.calibrate)
    {
      return b;
    }

  using sensing::SensingMode;
  sensing::NoiseFamily single{b.single_view, 1.0, 0.0, s.depth_sigma_m};
  b.single_view = sensing::CalibrateNoise (s.single_view.target_error_cm / 100.0, b.rig, SensingMode::single_view,
                                           single, s.calibration_seed, s.calibration_samples)
                      .noise;

  // the weaker detector scales pixel and depth noise together, anchored at
  // the single-view operating point
  sensing::NoiseFamily effdet{b.efficientdet, b.single_view.pixel_sigma, s.depth_sigma_m, 0.0};
  b.efficientdet = sensing::CalibrateNoise (s.efficientdet.target_error_cm / 100.0, b.rig, SensingMode::single_view,
                                            effdet, s.calibration_seed, s.calibration_samples)
                       .noise;

  sensing::NoiseFamily multi{b.multi_view, 1.0, 0.0, s.depth_sigma_m};
  b.multi_view = sensing::CalibrateNoise (s.multi_view.target_error_cm / 100.0, b.rig, SensingMode::multi_view, multi,
                                          s.calibration_seed, s.calibration_samples)
                     .noise;
  return b;
}

ExperimentResult
RunExperiment (const ExperimentConfig& cfg)
{
  const Prepared p = Prepare (cfg);

  std::vector<Unit> units;
  if (cfg.experiment == ExperimentKind::assoc)
    {
      for (double d : cfg.densities)
        {
          for (long t = 0; t < cfg.trials; ++t)
            {
              units.push_back ({d, t});
            }
        }
    }
  else
    {
      for (long t = 0; t < cfg.trials; ++t)
        {
          units.push_back ({0.0, t});
        }
    }

  std::vector<std::string> rows (units.size ());
  std::vector<MetricSink> sinks (units.size ());
  ParallelFor (units.size (), cfg.workers, [&] (std::size_t i) { rows[i] = RunUnit (p, units[i], sinks[i]); });

  ExperimentResult result;
  result.csv = JoinHeader (Header (cfg.experiment));
  for (const auto& r : rows)
    {
      result.csv += r;
    }

  // Deterministic grouping in first-seen order.
  std::vector<std::tuple<std::string, std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> values;
  for (const auto& sink : sinks)
    {
      for (const auto& [scheme, group, metric, v] : sink)
        {
          auto key = std::make_tuple (scheme, group, metric);
          auto [it, inserted] = values.try_emplace (key);
          if (inserted)
            {
              keys.push_back (key);
            }
          it->second.push_back (v);
        }
    }
  for (const auto& key : keys)
    {
      result.summaries.push_back (
          {std::get<0> (key), std::get<1> (key), std::get<2> (key), stats::Summarize (values.at (key))});
    }
  return result;
}

std::string
RunTrialRows (const ExperimentConfig& cfg, long trial)
{
  const Prepared p = Prepare (cfg);
  MetricSink sink;
  if (cfg.experiment != ExperimentKind::assoc)
    {
      return RunUnit (p, {0.0, trial}, sink);
    }
  std::string out;
  for (double d : cfg.densities)
    {
      out += RunUnit (p, {d, trial}, sink);
    }
  return out;
}

std::string
SummariesCsv (const std::vector<SummaryRow>& rows)
{
  csv::Writer w ({"scheme", "group", "metric", "n", "mean", "std", "ci95_low", "ci95_high", "p50", "p95"});
  for (const auto& r : rows)
    {
      w.Field (r.scheme)
          .Field (r.group)
          .Field (r.metric)
          .Field (static_cast<std::uint64_t> (r.stats.n))
          .Field (r.stats.mean)
          .Field (r.stats.std)
          .Field (r.stats.ci95_low)
          .Field (r.stats.ci95_high)
          .Field (r.stats.p50)
          .Field (r.stats.p95);
      w.EndRow ();
    }
  return w.Text ();
}

void
ParallelFor (std::size_t n, int workers, const std::function<void (std::size_t)>& fn)
{
  std::size_t threads = workers > 0 ? static_cast<std::size_t> (workers)
                                    : std::max<std::size_t> (1, std::thread::hardware_concurrency ());
  threads = std::min (threads, std::max<std::size_t> (n, 1));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex errMutex;
  std::size_t errIndex = n;
  std::exception_ptr err;

  auto work = [&] {
    while (!failed.load (std::memory_order_relaxed))
      {
        const std::size_t i = next.fetch_add (1);
        if (i >= n)
          {
            return;
          }
        try
          {
            fn (i);
          }
        catch (...)
          {
            std::lock_guard lock (errMutex);
            if (i < errIndex)
              {
                errIndex = i;
                err = std::current_exception ();
              }
            failed = true;
          }
      }
  };

  if (threads <= 1)
    {
      work ();
    }
  else
    {
      std::vector<std::thread> pool;
      pool.reserve (threads);
      for (std::size_t t = 0; t < threads; ++t)
        {
          pool.emplace_back (work);
        }
      for (auto& th : pool)
        {
          th.join ();
        }
    }
  if (err)
    {
      std::rethrow_exception (err);
    }
}

} // namespace svwc::harness
