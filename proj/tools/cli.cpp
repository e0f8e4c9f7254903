#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "spotfit/assess.hpp"
#include "spotfit/batch_engine.hpp"
#include "spotfit/bench.hpp"
#include "spotfit/io.hpp"
#include "spotfit/simulator.hpp"

namespace spotfit::cli {

namespace {

using nlohmann::json;

// Thrown for arguments CLI11 accepts syntactically but that make no sense.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io::IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open '" + path + "'");
  return in;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io::IoError("failed writing '" + path + "'");
}

// Writes the JSON report to `path`, or to `out` when no path was given.
void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file = open_output(path);
  file << text;
  finish_output(file, path);
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw UsageError(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

// "4-32", "9,16,25" and mixtures such as "4-8,16".
template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item(text.data() + start, comma - start);
    const std::size_t dash = item.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      const T lo = parse_number<T>(item.substr(0, dash), what);
      const T hi = parse_number<T>(item.substr(dash + 1), what);
      if (hi < lo) throw UsageError(std::string("empty range in ") + what + " '" + text + "'");
      for (T v = lo; v <= hi; ++v) values.push_back(v);
    } else {
      values.push_back(parse_number<T>(item, what));
    }
    start = comma + 1;
  }
  return values;
}

int default_repeats(std::size_t batch) {
  if (batch <= 10) return 200;
  if (batch <= 100) return 20;
  if (batch <= 1000) return 10;
  return 1;
}

Engine engine_from(const std::string& name) {
  const auto engine = parse_engine(name);
  if (!engine) throw UsageError("unknown engine '" + name + "'");
  return *engine;
}

json to_json(const SummaryStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"std", s.std}};
}

struct SimulateArgs {
  int size = 9;
  std::size_t count = 1000;
  double signal = 400;
  double background = 40;
  double sigma_min = 1;
  double sigma_max = 2;
  bool no_noise = false;
  bool no_round = false;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out;
  std::string truth;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
  SimConfig cfg;
  cfg.size = a.size;
  cfg.count = a.count;
  cfg.n_signal = a.signal;
  cfg.n_background = a.background;
  cfg.sigma_min = a.sigma_min;
  cfg.sigma_max = a.sigma_max;
  cfg.noise = !a.no_noise;
  cfg.quantize = !a.no_round;
  cfg.seed = a.seed;
  cfg.validate();

  const SimulatedBatch data = simulate_batch(cfg, a.workers);
  io::save_spb1(a.out, data.images);
  if (!a.truth.empty()) {
    std::ofstream truth = open_output(a.truth);
    io::write_truth_csv(truth, data.truths);
    finish_output(truth, a.truth);
  }
  err << "simulated " << data.images.size() << " spots of " << a.size << "x" << a.size
      << " pixels\n";
  return kOk;
}

struct FitArgs {
  std::string in;
  std::string out;
  std::string engine = "implicit3";
  int max_iter = 20;
  double min_delta = 1e-6;
  double min_step = 1e-4;
  std::string step_test = "absolute";
  double max_error = 0;
  unsigned workers = 0;
  std::string inits = "auto";
};

int cmd_fit(const FitArgs& a, std::ostream& err) {
  FitConfig config;
  config.max_iterations = a.max_iter;
  config.min_delta = a.min_delta;
  config.min_step = a.min_step;
  config.max_error = a.max_error;
  if (a.step_test == "absolute") {
    config.step_test = StepTest::Absolute;
  } else if (a.step_test == "relative") {
    config.step_test = StepTest::Relative;
  } else {
    throw UsageError("--step-test must be 'absolute' or 'relative'");
  }
  config.validate();
  const Engine engine = engine_from(a.engine);

  const ImageBatch images = io::load_spb1(a.in);
  std::vector<InitialEstimate> inits;
  if (a.inits == "auto") {
    inits = estimate_batch(images, config.bounds_for(images.grid()), a.workers);
  } else {
    std::ifstream in = open_input(a.inits);
    inits = io::read_inits_csv(in);
    if (inits.size() != images.size()) {
      throw io::FormatError("initial-estimate file has " + std::to_string(inits.size()) +
                                " rows for " + std::to_string(images.size()) + " images",
                            inits.size() + 1);
    }
  }

  BatchRequest request;
  request.images = &images;
  request.inits = inits;
  request.config = config;
  request.engine = engine;
  request.workers = a.workers;
  const BatchResult result = fit_batch(request);

  std::ofstream out = open_output(a.out);
  io::write_fit_csv(out, result.results);
  finish_output(out, a.out);

  const double rate =
      result.seconds > 0 ? static_cast<double>(result.results.size()) / result.seconds : 0.0;
  err << "fitted " << result.results.size() << " spots in " << result.seconds << " s ("
      << rate << " fits/s, " << to_string(engine) << ")\n";
  return kOk;
}

struct AssessArgs {
  std::string fits;
  std::string truth;
  std::string report;
  std::string errors;
  std::optional<double> signal;
  int max_iter = 20;
};

int cmd_assess(const AssessArgs& a, std::ostream& out) {
  std::vector<FitResult> fits;
  std::vector<TruthRecord> truths;
  {
    std::ifstream in = open_input(a.fits);
    fits = io::read_fit_csv(in);
  }
  {
    std::ifstream in = open_input(a.truth);
    truths = io::read_truth_csv(in);
  }
  const AccuracyStats stats = accuracy(fits, truths);
  const IterationHistogram hist = iteration_stats(fits, a.max_iter);

  json stops = json::object();
  for (StopReason r : kStopReasons) {
    stops[std::string(to_string(r))] = {{"count", hist.stop_count(r)},
                                        {"fraction", hist.stop_fraction(r)}};
  }
  json doc = {
      {"accuracy",
       {{"excluded", stats.excluded},
        {"position", to_json(stats.position)},
        {"sigma", to_json(stats.sigma)},
        {"used", stats.used}}},
      {"iterations",
       {{"bins", hist.bins},
        {"mean", hist.mean()},
        {"mode", hist.mode()},
        {"total", hist.total}}},
      {"stops", stops},
  };
  if (a.signal) {
    if (!(*a.signal > 0)) throw UsageError("--signal must be > 0");
    doc["expected_error_ratio"] = expected_error_ratio(stats, *a.signal);
  }
  emit_json(doc, a.report, out);

  if (!a.errors.empty()) {
    std::ofstream file = open_output(a.errors);
    file << "index,x,y,sigma\n";
    for (const FitError& e : fit_errors(fits, truths)) {
      file << e.index << ',' << e.x << ',' << e.y << ',' << e.sigma << '\n';
    }
    finish_output(file, a.errors);
  }
  return kOk;
}

struct BenchArgs {
  std::string sizes = "4-32";
  std::string batches = "10,100,1000,10000";
  std::string repeats;
  std::string engine = "implicit3";
  std::string report;
  std::string csv;
  double signal = 400;
  double background = 40;
  unsigned workers = 0;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchPlan plan;
  plan.sizes = parse_list<int>(a.sizes, "size list");
  plan.batch_sizes = parse_list<std::size_t>(a.batches, "batch list");
  if (a.repeats.empty()) {
    plan.repeats.clear();
    for (std::size_t b : plan.batch_sizes) plan.repeats.push_back(default_repeats(b));
  } else {
    plan.repeats = parse_list<int>(a.repeats, "repeat list");
  }
  plan.engine = engine_from(a.engine);
  plan.n_signal = a.signal;
  plan.n_background = a.background;
  plan.workers = a.workers;
  plan.seed = a.seed;

  const BenchReport report = run_bench(plan, [&](const BenchEntry& e) {
    err << "S=" << e.size << " batch=" << e.batch << " " << e.fits_per_second << " fits/s\n";
  });

  json entries = json::array();
  for (const BenchEntry& e : report.entries) {
    entries.push_back({{"batch", e.batch},
                       {"fits_per_second", e.fits_per_second},
                       {"mean_seconds", e.mean_seconds},
                       {"pixels_per_second", e.pixels_per_second},
                       {"repeats", e.repeats},
                       {"size", e.size},
                       {"under_resolved", e.under_resolved}});
  }
  emit_json({{"engine", report.engine}, {"entries", entries}, {"machine", report.machine}},
            a.report, out);

  if (!a.csv.empty()) {
    std::ofstream file = open_output(a.csv);
    file << "size,batch,repeats,mean_seconds,fits_per_second,pixels_per_second,under_resolved\n";
    for (const BenchEntry& e : report.entries) {
      file << e.size << ',' << e.batch << ',' << e.repeats << ',' << e.mean_seconds << ','
           << e.fits_per_second << ',' << e.pixels_per_second << ',' << e.under_resolved << '\n';
    }
    finish_output(file, a.csv);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian spot fitting with implicit amplitude and background", "spotfit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic spots with ground truth");
  simulate->add_option("--size", sim.size, "Image side length in pixels")->capture_default_str();
  simulate->add_option("--count", sim.count, "Number of spots")->capture_default_str();
  simulate->add_option("--signal", sim.signal, "Integrated signal counts")->capture_default_str();
  simulate->add_option("--background", sim.background, "Total background counts")
      ->capture_default_str();
  simulate->add_option("--sigma-min", sim.sigma_min)->capture_default_str();
  simulate->add_option("--sigma-max", sim.sigma_max)->capture_default_str();
  simulate->add_flag("--no-noise", sim.no_noise, "Write noiseless intensities");
  simulate->add_flag("--no-round", sim.no_round, "Keep unrounded real intensities");
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--workers", sim.workers, "0 = all hardware threads");
  simulate->add_option("--out", sim.out, "SPB1 output file")->required();
  simulate->add_option("--truth", sim.truth, "Truth CSV output file");

  FitArgs fit;
  auto* fitcmd = app.add_subcommand("fit", "Fit every spot of an SPB1 file");
  fitcmd->add_option("--in", fit.in, "SPB1 input file")->required();
  fitcmd->add_option("--out", fit.out, "Fit CSV output file")->required();
  fitcmd->add_option("--engine", fit.engine, "implicit3 or explicit5")->capture_default_str();
  fitcmd->add_option("--max-iter", fit.max_iter)->capture_default_str();
  fitcmd->add_option("--min-delta", fit.min_delta)->capture_default_str();
  fitcmd->add_option("--min-step", fit.min_step)->capture_default_str();
  fitcmd->add_option("--step-test", fit.step_test, "absolute or relative")->capture_default_str();
  fitcmd->add_option("--max-error", fit.max_error, "chi^2 early stop, 0 disables")
      ->capture_default_str();
  fitcmd->add_option("--workers", fit.workers, "0 = all hardware threads");
  fitcmd->add_option("--inits", fit.inits, "'auto' or a CSV with index,x,y,sigma,alpha,beta")
      ->capture_default_str();

  AssessArgs assess;
  auto* assesscmd = app.add_subcommand("assess", "Accuracy and iteration statistics");
  assesscmd->add_option("--fits", assess.fits, "Fit CSV")->required();
  assesscmd->add_option("--truth", assess.truth, "Truth CSV")->required();
  assesscmd->add_option("--report", assess.report, "JSON report file (default stdout)");
  assesscmd->add_option("--errors", assess.errors, "Per-fit error CSV");
  assesscmd->add_option("--signal", assess.signal, "Signal counts for the shot-noise ratio");
  assesscmd->add_option("--max-iter", assess.max_iter, "Histogram range")->capture_default_str();

  BenchArgs bench;
  auto* benchcmd = app.add_subcommand("bench", "Throughput over image and batch sizes");
  benchcmd->add_option("--sizes", bench.sizes, "e.g. 4-32 or 9,16,25")->capture_default_str();
  benchcmd->add_option("--batches", bench.batches)->capture_default_str();
  benchcmd->add_option("--repeats", bench.repeats, "One per batch size");
  benchcmd->add_option("--engine", bench.engine)->capture_default_str();
  benchcmd->add_option("--report", bench.report, "JSON report file (default stdout)");
  benchcmd->add_option("--csv", bench.csv, "CSV table file");
  benchcmd->add_option("--signal", bench.signal)->capture_default_str();
  benchcmd->add_option("--background", bench.background)->capture_default_str();
  benchcmd->add_option("--workers", bench.workers, "0 = all hardware threads");
  benchcmd->add_option("--seed", bench.seed)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, err);
    if (*fitcmd) return cmd_fit(fit, err);
    if (*assesscmd) return cmd_assess(assess, out);
    if (*benchcmd) return cmd_bench(bench, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kMalformed;
  } catch (const MismatchedLengths& e) {
    err << "error: " << e.what() << '\n';
    return kMalformed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace spotfit::cli
