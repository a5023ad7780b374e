// svwc: command-line front end for the beam, association and random-access
// experiments.
//
//   svwc beam|assoc|rach [--config f] [--seed s] [--trials n] [--out csv]
//   svwc sweep --param key --values a,b,c [--config f] [--out-dir d]
//   svwc plotdata --in a.csv [--in b.csv ...] --y col [--x col] [--out csv]
//   svwc calibrate [--config f]
//   svwc evallog --log det.csv [--mode multi_view|single_view] [--config f]
//
// Exit status: 0 success, 2 configuration or usage error, 3 runtime error.

#include "svwc/config.hpp"
#include "svwc/csv.hpp"
#include "svwc/detection_log.hpp"
#include "svwc/experiment.hpp"
#include "svwc/stats.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace svwc;
using harness::ConfigError;
using harness::ExperimentConfig;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Thrown for bad command-line input that is not a config-file problem.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct CommonOptions
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<int> workers;
  std::string out;
  std::string summary;
  std::vector<std::string> overrides;
};

void
AddCommon (CLI::App* cmd, CommonOptions& o)
{
  cmd->add_option ("--config", o.config, "configuration file (key = value lines)");
  cmd->add_option ("--seed", o.seed, "master seed");
  cmd->add_option ("--trials", o.trials, "trials per scheme");
  cmd->add_option ("--workers", o.workers, "worker threads, 0 = all cores");
  cmd->add_option ("--set", o.overrides, "extra key=value override, repeatable");
}

ExperimentConfig
BuildConfig (const CommonOptions& o, std::optional<harness::ExperimentKind> kind)
{
  ExperimentConfig cfg = o.config.empty () ? ExperimentConfig{} : harness::LoadConfigFile (o.config);
  if (kind)
    {
      cfg.experiment = *kind;
    }
  for (const auto& kv : o.overrides)
    {
      const auto eq = kv.find ('=');
      if (eq == std::string::npos)
        {
          throw ConfigError ("override '" + kv + "' is not key=value", 0);
        }
      harness::SetConfigValue (cfg, kv.substr (0, eq), kv.substr (eq + 1));
    }
  if (o.seed)
    {
      cfg.seed = *o.seed;
    }
  if (o.trials)
    {
      harness::SetConfigValue (cfg, "trials", std::to_string (*o.trials));
    }
  if (o.workers)
    {
      harness::SetConfigValue (cfg, "workers", std::to_string (*o.workers));
    }
  harness::ValidateConfig (cfg);
  return cfg;
}

void
WriteText (const std::string& path, const std::string& text)
{
  if (path.empty () || path == "-")
    {
      std::cout << text;
      return;
    }
  std::ofstream out (path, std::ios::binary);
  if (!out)
    {
      throw std::runtime_error ("cannot write " + path);
    }
  out << text;
  if (!out)
    {
      throw std::runtime_error ("write failed for " + path);
    }
}

std::string
ReadText (const std::string& path)
{
  std::ifstream in (path, std::ios::binary);
  if (!in)
    {
      throw UsageError ("cannot read " + path);
    }
  std::ostringstream ss;
  ss << in.rdbuf ();
  return ss.str ();
}

void
PrintSummaries (const std::vector<harness::SummaryRow>& rows, std::ostream& os)
{
  for (const auto& r : rows)
    {
      os << r.scheme;
      if (!r.group.empty ())
        {
          os << " [" << r.group << "]";
        }
      os << " " << r.metric << ": mean " << r.stats.mean << " (95% CI " << r.stats.ci95_low << " .. "
         << r.stats.ci95_high << ", n " << r.stats.n << ")\n";
    }
}

int
RunExperimentCommand (const CommonOptions& o, harness::ExperimentKind kind)
{
  const ExperimentConfig cfg = BuildConfig (o, kind);
  const auto result = harness::RunExperiment (cfg);
  const std::string out = o.out.empty () ? cfg.output : o.out;
  WriteText (out, result.csv);
  if (!o.summary.empty ())
    {
      WriteText (o.summary, harness::SummariesCsv (result.summaries));
    }
  if (!out.empty () && out != "-")
    {
      PrintSummaries (result.summaries, std::cout);
    }
  return 0;
}

std::vector<std::string>
SplitList (const std::string& text)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss (text);
  while (std::getline (ss, item, ','))
    {
      const auto b = item.find_first_not_of (" \t");
      const auto e = item.find_last_not_of (" \t");
      if (b == std::string::npos)
        {
          throw UsageError ("empty entry in --values");
        }
      out.push_back (item.substr (b, e - b + 1));
    }
  if (out.empty ())
    {
      throw UsageError ("--values needs at least one value");
    }
  return out;
}

int
RunSweep (const CommonOptions& o, const std::string& param, const std::string& values, const std::string& outDir)
{
  const ExperimentConfig base = BuildConfig (o, std::nullopt);
  const auto list = SplitList (values);
  // Validate every point before running any of them.
  std::vector<ExperimentConfig> points;
  for (const auto& v : list)
    {
      ExperimentConfig cfg = base;
      harness::SetConfigValue (cfg, param, v);
      harness::ValidateConfig (cfg);
      points.push_back (cfg);
    }
  std::filesystem::create_directories (outDir);
  std::string stem = param;
  for (char& c : stem)
    {
      c = c == '.' ? '_' : c;
    }
  for (std::size_t i = 0; i < points.size (); ++i)
    {
      const auto result = harness::RunExperiment (points[i]);
      const auto path = std::filesystem::path (outDir) / (stem + "=" + list[i] + ".csv");
      WriteText (path.string (), result.csv);
      std::cout << path.string () << "\n";
    }
  return 0;
}

/**
 * Reshapes experiment CSVs into (series, x, y, ci, n) rows: y is the mean of
 * the chosen column over each (series, x) group and ci the half-width of its
 * normal-approximation 95% interval. Inputs given as `value=path` take x from
 * `value` when --x is not set, which is how sweep outputs are combined.
 */
int
RunPlotData (const std::vector<std::string>& inputs, const std::string& xCol, const std::string& yCol,
             const std::string& seriesCol, const std::string& out)
{
  using Key = std::pair<std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> groups;

  for (const auto& input : inputs)
    {
      std::string path = input;
      std::string xValue;
      const auto eq = input.find ('=');
      if (eq != std::string::npos && !std::filesystem::exists (input))
        {
          xValue = input.substr (0, eq);
          path = input.substr (eq + 1);
        }
      csv::Table table;
      try
        {
          table = csv::Parse (ReadText (path));
        }
      catch (const std::invalid_argument& e)
        {
          throw UsageError (path + ": " + e.what ());
        }
      std::size_t y, series;
      std::optional<std::size_t> x;
      try
        {
          y = table.Column (yCol);
          series = table.Column (seriesCol);
          if (!xCol.empty ())
            {
              x = table.Column (xCol);
            }
        }
      catch (const std::out_of_range&)
        {
          throw UsageError (path + ": missing column");
        }
      if (!x && xValue.empty ())
        {
          xValue = "0";
        }
      for (const auto& row : table.rows)
        {
          Key key{row[series], x ? row[*x] : xValue};
          auto [it, inserted] = groups.try_emplace (key);
          if (inserted)
            {
              order.push_back (key);
            }
          try
            {
              it->second.push_back (std::stod (row[y]));
            }
          catch (const std::exception&)
            {
              throw UsageError (path + ": non-numeric value '" + row[y] + "' in column " + yCol);
            }
        }
    }

  csv::Writer w ({"series", "x", "y", "ci", "n"});
  for (const auto& key : order)
    {
      const auto s = stats::Summarize (groups.at (key));
      w.Field (key.first).Field (key.second).Field (s.mean).Field (s.ci95_high - s.mean).Field (
          static_cast<std::uint64_t> (s.n));
      w.EndRow ();
    }
  WriteText (out, w.Text ());
  return 0;
}

int
RunCalibrate (const CommonOptions& o)
{
  const ExperimentConfig cfg = BuildConfig (o, harness::ExperimentKind::beam);
  const auto b = harness::MakeBeamConfig (cfg);
  csv::Writer w ({"variant", "recall", "precision", "fp_rate", "pixel_sigma", "depth_sigma_m"});
  const std::pair<const char*, const sensing::SensingNoise*> rows[] = {
      {"multi_view", &b.multi_view}, {"single_view", &b.single_view}, {"efficientdet", &b.efficientdet}};
  for (const auto& [name, n] : rows)
    {
      w.Field (name).Field (n->recall).Field (n->precision).Field (n->fp_rate).Field (n->pixel_sigma).Field (
          n->depth_sigma);
      w.EndRow ();
    }
  WriteText (o.out, w.Text ());
  std::cout << "prs_sigma_m " << b.prs_sigma_m << "\n";
  return 0;
}

int
RunEvalLog (const CommonOptions& o, const std::string& logPath, const std::string& mode)
{
  const ExperimentConfig cfg = BuildConfig (o, harness::ExperimentKind::beam);
  sensing::SensingMode m;
  if (mode == "multi_view")
    {
      m = sensing::SensingMode::multi_view;
    }
  else if (mode == "single_view")
    {
      m = sensing::SensingMode::single_view;
    }
  else
    {
      throw UsageError ("--mode must be multi_view or single_view");
    }
  std::vector<sensing::LogDetection> log;
  try
    {
      log = sensing::LoadDetectionLog (logPath);
    }
  catch (const std::invalid_argument& e)
    {
      throw UsageError (e.what ());
    }
  const auto rig = harness::MakeBeamConfig ([&] {
                     auto c = cfg;
                     c.sensing.calibrate = false;
                     return c;
                   }())
                       .rig;
  const auto eval = sensing::EvaluateDetectionLog (log, rig, m);
  std::cout << "truths " << eval.samples << " detected " << eval.detected << " mean_error_m " << eval.mean_error_m
            << "\n";
  return 0;
}

} // namespace

int
main (int argc, char** argv)
{
  CLI::App app{"Sensing-aided beam management, cell association and random access experiments"};
  app.require_subcommand (1);

  CommonOptions common;
  std::map<std::string, harness::ExperimentKind> kinds{{"beam", harness::ExperimentKind::beam},
                                                        {"assoc", harness::ExperimentKind::assoc},
                                                        {"rach", harness::ExperimentKind::rach}};
  std::map<std::string, CLI::App*> experimentCmds;
  for (const auto& [name, kind] : kinds)
    {
      auto* cmd = app.add_subcommand (name, "run the " + name + " experiment");
      AddCommon (cmd, common);
      cmd->add_option ("--out", common.out, "output CSV (default: config `output`, else stdout)");
      cmd->add_option ("--summary", common.summary, "also write per-scheme summary statistics here");
      experimentCmds[name] = cmd;
    }

  std::string param, values, outDir = ".";
  auto* sweep = app.add_subcommand ("sweep", "run one experiment per value of a config key");
  AddCommon (sweep, common);
  sweep->add_option ("--param", param, "config key to vary")->required ();
  sweep->add_option ("--values", values, "comma-separated values")->required ();
  sweep->add_option ("--out-dir", outDir, "directory for the per-value CSVs");

  std::vector<std::string> inputs;
  std::string xCol, yCol, seriesCol = "scheme", plotOut;
  auto* plot = app.add_subcommand ("plotdata", "reshape experiment CSVs into (x, y, ci) rows");
  plot->add_option ("--in", inputs, "input CSV, or value=path")->required ();
  plot->add_option ("--x", xCol, "x column (default: value from value=path)");
  plot->add_option ("--y", yCol, "y column")->required ();
  plot->add_option ("--series", seriesCol, "series column");
  plot->add_option ("--out", plotOut, "output CSV (default stdout)");

  auto* calibrate = app.add_subcommand ("calibrate", "print the calibrated sensing noise");
  AddCommon (calibrate, common);
  calibrate->add_option ("--out", common.out, "output CSV (default stdout)");

  std::string logPath, mode = "multi_view";
  auto* evallog = app.add_subcommand ("evallog", "score a recorded detection log");
  AddCommon (evallog, common);
  evallog->add_option ("--log", logPath, "detection log CSV")->required ();
  evallog->add_option ("--mode", mode, "multi_view or single_view");

  try
    {
      app.parse (argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      const int rc = app.exit (e);
      return rc == 0 ? 0 : kExitConfig;
    }

  try
    {
      for (const auto& [name, cmd] : experimentCmds)
        {
          if (cmd->parsed ())
            {
              return RunExperimentCommand (common, kinds.at (name));
            }
        }
      if (sweep->parsed ())
        {
          return RunSweep (common, param, values, outDir);
        }
      if (plot->parsed ())
        {
          return RunPlotData (inputs, xCol, yCol, seriesCol, plotOut);
        }
      if (calibrate->parsed ())
        {
          return RunCalibrate (common);
        }
      if (evallog->parsed ())
        {
          return RunEvalLog (common, logPath, mode);
        }
    }
  catch (const ConfigError& e)
    {
      std::cerr << "svwc: config error: " << e.what () << "\n";
      return kExitConfig;
    }
  catch (const UsageError& e)
    {
      std::cerr << "svwc: " << e.what () << "\n";
      return kExitConfig;
    }
  catch (const std::exception& e)
    {
      std::cerr << "svwc: error: " << e.what () << "\n";
      return kExitRuntime;
    }
  return kExitConfig;
}
