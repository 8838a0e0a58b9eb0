#include "hardcore/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "hardcore/geometry.hpp"

namespace hardcore {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Estimator streams live under their own tag so they never alias the
// simulation streams from_seed(seed).substream(rep).
constexpr std::uint64_t kEstimatorTag = 0x657374696d61746fULL;

json estimate_json(const Estimate& e) { return json{{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}}; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_output(path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> header(const ExperimentConfig& config, const std::string& what) {
  return {"hardcore " + what, "config_hash=" + config_hash(config)};
}

// Per-replication values for one model.
struct ReplicationStats {
  double count = 0.0;
  double intensity = 0.0;
  double volume_fraction = 0.0;
  std::vector<double> cover_covariance;
  std::vector<double> two_point;
  std::vector<double> exceedances;
};

ReplicationStats replication_stats(const ExperimentConfig& config, const GrainSet& set, CounterRng rng) {
  ReplicationStats s;
  const auto n = std::count_if(set.grains.begin(), set.grains.end(),
                               [&](const Grain& g) { return set.window.in_core(g.center); });
  s.count = static_cast<double>(n);
  s.intensity = s.count / set.window.core_volume();
  s.volume_fraction = covered_fraction(set, static_cast<std::size_t>(config.volume_probes), rng.substream(0));
  s.cover_covariance =
      cover_covariance_once(set, config.lags, static_cast<std::size_t>(config.probes), rng.substream(1));
  s.two_point = pair_correlation_once(set, config.lags, config.bandwidth);
  s.exceedances = radius_exceedances(set, config.radius_grid);
  return s;
}

// The expensive part of a replication: its grains are dropped once the
// sink and the statistics are done.
struct ReplicationWork {
  BooleanSample original;
  std::vector<ThinnedSample> thinned;
  std::vector<ReplicationStats> stats;
};

std::string curve_file(const Curve& c) { return c.model + "_" + c.statistic + ".csv"; }

bool is_pareto(const RadiusLaw& law) { return law.kind() == RadiusLaw::Kind::pareto; }

Statistic statistic_of(const std::string& name) { return parse_statistic(name); }

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::string> model_names(const ExperimentConfig& config) {
  std::vector<std::string> names{"original"};
  for (WeightKernel k : config.kernels()) names.push_back(to_string(k));
  return names;
}

SimulationResult simulate_and_estimate(const ExperimentConfig& config, int jobs,
                                       const ReplicationSink& on_replication) {
  config.validate();
  const RadiusLaw law = config.make_law();
  const std::vector<WeightKernel> kernels = config.kernels();
  const std::vector<std::string> names = model_names(config);

  SimulationResult result;
  Window window = config.core_window();
  if (config.margin >= 0.0) {
    window.margin = config.margin;
    result.bias_bound = margin_bias_bound(config.lambda, law, window, window.margin);
  } else {
    const auto sides = window.core_sides();
    const double cap = config.max_margin >= 0.0
                           ? config.max_margin
                           : *std::max_element(sides.begin(), sides.begin() + config.dimension);
    const MarginChoice choice = default_margin(config.lambda, law, window, config.epsilon, cap);
    window.margin = choice.margin;
    result.bias_bound = choice.bias_bound;
    result.margin_capped = choice.capped;
  }
  result.window = window;

  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t models = names.size();
  std::vector<std::vector<ReplicationStats>> per_model(models, std::vector<ReplicationStats>(reps));
  const CounterRng estimator_root = CounterRng::from_seed(config.seed).substream(kEstimatorTag);

  const std::size_t batch = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t first = 0; first < reps; first += batch) {
    const std::size_t count = std::min(batch, reps - first);
    std::vector<ReplicationWork> work(count);
    parallel_for(count, jobs, [&](std::size_t i) {
      const std::size_t rep = first + i;
      ReplicationWork& w = work[i];
      w.original = sample_boolean(config.lambda, law, kernels.front(), window, config.seed, rep);
      for (WeightKernel k : kernels) w.thinned.push_back(thin(w.original, k));
      const CounterRng rng = estimator_root.substream(rep);
      w.stats.push_back(replication_stats(config, view(w.original), rng.substream(0)));
      for (std::size_t k = 0; k < w.thinned.size(); ++k)
        w.stats.push_back(replication_stats(config, view(w.thinned[k]), rng.substream(k + 1)));
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (on_replication) on_replication(first + i, work[i].original, work[i].thinned);
      if (first + i == 0) result.expected_count = work[i].original.expected_count;
      for (std::size_t m = 0; m < models; ++m) per_model[m][first + i] = std::move(work[i].stats[m]);
    }
  }

  for (std::size_t m = 0; m < models; ++m) {
    const auto& rows = per_model[m];
    ModelEstimates est;
    est.model = names[m];
    std::vector<double> column(reps);
    auto pooled = [&](double ReplicationStats::*field) {
      for (std::size_t r = 0; r < reps; ++r) column[r] = rows[r].*field;
      return summarize(column);
    };
    est.count = pooled(&ReplicationStats::count);
    est.intensity = pooled(&ReplicationStats::intensity);
    est.volume_fraction = pooled(&ReplicationStats::volume_fraction);
    auto curves = [&](std::vector<double> ReplicationStats::*field) {
      std::vector<std::vector<double>> out;
      out.reserve(reps);
      for (const auto& r : rows) out.push_back(r.*field);
      return out;
    };
    est.cover_covariance = aggregate_replications(config.lags, curves(&ReplicationStats::cover_covariance));
    est.two_point = aggregate_replications(config.lags, curves(&ReplicationStats::two_point));
    try {
      est.radius_tail = radius_tail_from_counts(config.radius_grid, curves(&ReplicationStats::exceedances));
    } catch (const std::domain_error&) {
      est.radius_tail.lags = config.radius_grid;
      est.radius_tail.values.assign(config.radius_grid.size(), kNaN);
      est.radius_tail.std_error.assign(config.radius_grid.size(), kNaN);
      est.radius_tail.replications = reps;
    }
    result.models.push_back(std::move(est));
  }
  return result;
}

std::vector<Curve> analytic_curves(const ExperimentConfig& config, const std::vector<double>& lags,
                                   const std::vector<double>& radius_grid, int jobs) {
  config.validate();
  const std::vector<WeightKernel> kernels = config.kernels();
  const AnalyticsOptions options = config.analytics_options();
  std::vector<ThinnedModel> thinned;
  for (WeightKernel k : kernels) thinned.emplace_back(config.model(k), options);
  const ThinnedModel& base = thinned.front();
  const RadiusLaw& law = base.spec().law;

  std::vector<Curve> curves;
  // Point evaluations and asymptote setups, run as one flat task list.
  std::vector<std::function<void()>> tasks;
  std::vector<std::size_t> task_curve;
  std::vector<AsymptoticLaw> laws;

  auto add_curve = [&](std::string model, Statistic stat, bool use_lags) {
    Curve c;
    c.model = std::move(model);
    c.statistic = to_string(stat);
    c.x = use_lags ? lags : radius_grid;
    c.y.assign(c.x.size(), kNaN);
    c.asymptote.assign(c.x.size(), kNaN);
    curves.push_back(std::move(c));
    laws.emplace_back();
    return curves.size() - 1;
  };
  auto add_retention_curve = [&](std::string model) {
    Curve c;
    c.model = std::move(model);
    c.statistic = "retention";
    c.x = radius_grid;
    c.y.assign(c.x.size(), kNaN);
    c.asymptote.assign(c.x.size(), kNaN);
    curves.push_back(std::move(c));
    laws.emplace_back();
    return curves.size() - 1;
  };
  auto add_points = [&](std::size_t index, std::function<double(double)> value) {
    for (std::size_t j = 0; j < curves[index].x.size(); ++j) {
      tasks.push_back([&curves, index, j, value] { curves[index].y[j] = value(curves[index].x[j]); });
      task_curve.push_back(index);
    }
  };
  auto add_law = [&](std::size_t index, std::function<AsymptoticLaw()> make) {
    tasks.push_back([&laws, index, make] { laws[index] = make(); });
    task_curve.push_back(std::numeric_limits<std::size_t>::max());
  };

  {
    const std::size_t k = add_curve("original", Statistic::cover_covariance, true);
    add_points(k, [&base](double z) { return base.boolean_covariance(z); });
    add_law(k, [&base] { return boolean_covariance_asymptote(base); });
    const std::size_t xi = add_curve("original", Statistic::two_point, true);
    add_points(xi, [](double) { return 0.0; });
    const std::size_t tail = add_curve("original", Statistic::radius_tail, false);
    add_points(tail, [&law](double r) { return law.tail(r); });
    if (is_pareto(law))
      add_law(tail, [&law] {
        AsymptoticLaw a;
        a.kind = AsymptoticLaw::Kind::power_law;
        a.amplitude = law.slowly_varying_constant();
        a.exponent = law.alpha();
        a.note = "radius law tail";
        return a;
      });
  }
  for (const ThinnedModel& m : thinned) {
    const std::string name = to_string(m.spec().kernel);
    const ThinnedModel* model = &m;
    const std::size_t k = add_curve(name, Statistic::cover_covariance, true);
    if (m.dimension() > 2) {
      curves[k].error = "k_th is evaluated by quadrature only for d = 1, 2; use simulation";
    } else {
      add_points(k, [model](double z) { return model->thinned_covariance(z); });
    }
    const std::size_t xi = add_curve(name, Statistic::two_point, true);
    add_points(xi, [model](double z) { return model->thinned_two_point_correlation(z); });
    const std::size_t tail = add_curve(name, Statistic::radius_tail, false);
    add_points(tail, [model](double r) { return model->thinned_radius_tail(r); });
    const std::size_t h = add_retention_curve(name);
    add_points(h, [model](double r) { return model->mean_retention(r); });
    for (std::size_t index : {k, xi, tail}) {
      if (!curves[index].ok()) continue;
      const Statistic stat = statistic_of(curves[index].statistic);
      add_law(index, [model, stat] { return asymptotic_prediction(*model, stat); });
    }
  }

  std::mutex error_mutex;
  std::vector<std::string> task_errors(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    try {
      tasks[t]();
    } catch (const std::exception& e) {
      task_errors[t] = e.what();
    }
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (task_errors[t].empty()) continue;
    const std::size_t index = task_curve[t];
    if (index < curves.size()) {
      if (curves[index].error.empty()) curves[index].error = task_errors[t];
    }
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    Curve& c = curves[i];
    if (!c.ok()) {
      std::fill(c.y.begin(), c.y.end(), kNaN);
      continue;
    }
    const AsymptoticLaw& a = laws[i];
    c.asymptote_note = a.note;
    if (!a.has_prediction()) continue;
    for (std::size_t j = 0; j < c.x.size(); ++j) c.asymptote[j] = a.evaluate(c.x[j]);
  }
  return curves;
}

double z_score(double empirical, double analytic, double std_error) {
  if (!(std_error > 0.0) || !std::isfinite(empirical) || !std::isfinite(analytic)) return kNaN;
  return (empirical - analytic) / std_error;
}

std::vector<ComparisonRow> compare_curves(const Curve& analytic, const CovarianceEstimate& empirical) {
  if (analytic.x != empirical.lags)
    throw std::invalid_argument("lag grids of " + analytic.model + " " + analytic.statistic +
                                " differ between analytic curve and estimate");
  std::vector<ComparisonRow> rows;
  for (std::size_t j = 0; j < analytic.x.size(); ++j) {
    ComparisonRow r;
    r.statistic = analytic.statistic;
    r.model = analytic.model;
    r.lag = analytic.x[j];
    r.analytic = analytic.y[j];
    r.empirical = empirical.values[j];
    r.std_error = empirical.std_error[j];
    r.asymptotic = j < analytic.asymptote.size() ? analytic.asymptote[j] : kNaN;
    r.z = z_score(r.empirical, r.analytic, r.std_error);
    rows.push_back(r);
  }
  return rows;
}

Verdict pointwise_verdict(std::span<const ComparisonRow> rows, double threshold) {
  Verdict v;
  v.rule = "pointwise";
  if (!rows.empty()) {
    v.model = rows.front().model;
    v.statistic = rows.front().statistic;
  }
  double worst = 0.0;
  std::size_t used = 0, over = 0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.z)) continue;
    ++used;
    worst = std::max(worst, std::abs(r.z));
    if (std::abs(r.z) > threshold) ++over;
  }
  if (used == 0) {
    v.skipped = true;
    v.detail = "no finite z-scores";
    return v;
  }
  v.pass = over == 0;
  std::ostringstream os;
  os << over << " of " << used << " points beyond " << threshold << " stderr; max |z| = " << worst;
  v.detail = os.str();
  return v;
}

Verdict decay_verdict(const Curve& curve, const DecayClass& expected, const AsymptoticLaw& law, double lo,
                      double hi, double slope_tolerance) {
  Verdict v;
  v.model = curve.model;
  v.statistic = curve.statistic;
  std::ostringstream os;
  os << "expected " << expected.describe() << "; ";
  if (!curve.ok()) {
    v.rule = expected.kind == DecayClass::Kind::power ? "slope" : "bound";
    v.skipped = true;
    v.detail = os.str() + curve.error;
    return v;
  }
  switch (expected.kind) {
    case DecayClass::Kind::power: {
      v.rule = "slope";
      std::vector<double> x, y;
      bool positive = true;
      for (std::size_t j = 0; j < curve.x.size(); ++j) {
        if (curve.x[j] < lo || curve.x[j] > hi) continue;
        if (!(curve.y[j] > 0.0)) positive = false;
        x.push_back(curve.x[j]);
        y.push_back(curve.y[j]);
      }
      if (x.size() < 2 || !positive) {
        v.detail = os.str() + (positive ? "fewer than two points in the fit range" : "nonpositive values in the fit range");
        return v;
      }
      const TailFit fit = fit_tail_exponent(x, y, lo, hi);
      v.pass = std::abs(fit.slope + expected.exponent) <= slope_tolerance;
      os << "fitted slope " << fit.slope << " on [" << lo << ", " << hi << "], target " << -expected.exponent
         << " +- " << slope_tolerance;
      break;
    }
    case DecayClass::Kind::exponential: {
      v.rule = "bound";
      if (law.kind != AsymptoticLaw::Kind::exponential_bound) {
        v.detail = os.str() + "no exponential bound available";
        return v;
      }
      std::size_t violations = 0;
      double worst = 0.0;
      for (std::size_t j = 0; j < curve.x.size(); ++j) {
        const double bound = law.evaluate(curve.x[j]);
        const bool covered = curve.x[j] >= law.valid_from;
        const double ratio = std::abs(curve.y[j]) / bound;
        if (bound > 0.0) worst = std::max(worst, ratio);
        if (!covered || !(std::abs(curve.y[j]) <= bound)) ++violations;
      }
      v.pass = violations == 0;
      os << violations << " of " << curve.x.size() << " grid points not dominated; max |value|/bound = " << worst;
      break;
    }
    case DecayClass::Kind::zero: {
      v.rule = "zero";
      double worst = 0.0;
      for (double y : curve.y) worst = std::max(worst, std::abs(y));
      v.pass = worst == 0.0;
      os << "max |value| = " << worst;
      break;
    }
  }
  v.detail = os.str();
  return v;
}

Verdict amplitude_verdict(const Curve& curve, double lo, double hi, double tolerance) {
  Verdict v;
  v.rule = "amplitude";
  v.model = curve.model;
  v.statistic = curve.statistic;
  if (!curve.ok()) {
    v.skipped = true;
    v.detail = curve.error;
    return v;
  }
  std::ptrdiff_t at = -1;
  for (std::size_t j = 0; j < curve.x.size(); ++j)
    if (curve.x[j] >= lo && curve.x[j] <= hi && std::isfinite(curve.asymptote[j]) && curve.asymptote[j] != 0.0)
      at = static_cast<std::ptrdiff_t>(j);
  if (at < 0) {
    v.skipped = true;
    v.detail = "no asymptote in range";
    return v;
  }
  const auto j = static_cast<std::size_t>(at);
  const double ratio = curve.y[j] / curve.asymptote[j];
  v.pass = std::abs(ratio - 1.0) <= tolerance;
  std::ostringstream os;
  os << "value/asymptote = " << ratio << " at " << curve.x[j] << ", tolerance " << tolerance;
  v.detail = os.str();
  return v;
}

bool ComparisonReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.skipped || v.pass; });
}

ComparisonReport build_report(const ExperimentConfig& config, const SimulationResult& simulation,
                              const std::vector<Curve>& pointwise, const std::vector<Curve>& asymptotic) {
  ComparisonReport report;
  const std::vector<WeightKernel> kernels = config.kernels();
  const AnalyticsOptions options = config.analytics_options();

  auto estimates_for = [&](const std::string& model) -> const ModelEstimates& {
    for (const auto& m : simulation.models)
      if (m.model == model) return m;
    throw std::invalid_argument("no estimates for model " + model);
  };
  auto add_group = [&](std::vector<ComparisonRow> rows) {
    report.verdicts.push_back(pointwise_verdict(rows, config.z_threshold));
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  };
  auto scalar_row = [](std::string stat, std::string model, double analytic, const Estimate& e) {
    ComparisonRow r;
    r.statistic = std::move(stat);
    r.model = std::move(model);
    r.lag = 0.0;
    r.analytic = analytic;
    r.empirical = e.mean;
    r.std_error = e.std_error;
    r.asymptotic = kNaN;
    r.z = z_score(r.empirical, r.analytic, r.std_error);
    return r;
  };

  // Scalars.
  const ThinnedModel base(config.model(kernels.front()), options);
  {
    const ModelEstimates& e = estimates_for("original");
    add_group({scalar_row("intensity", "original", config.lambda, e.intensity)});
    add_group({scalar_row("volume_fraction", "original", base.boolean_volume_fraction(), e.volume_fraction)});
  }
  for (WeightKernel k : kernels) {
    const ThinnedModel m(config.model(k), options);
    const std::string name = to_string(k);
    const ModelEstimates& e = estimates_for(name);
    add_group({scalar_row("intensity", name, m.thinned_intensity(), e.intensity)});
    add_group({scalar_row("volume_fraction", name, m.thinned_volume_fraction(), e.volume_fraction)});
  }

  // Curves at the simulated lags.
  for (const Curve& c : pointwise) {
    if (c.statistic == "retention") continue;
    const ModelEstimates& e = estimates_for(c.model);
    const CovarianceEstimate& est = c.statistic == "cover_covariance" ? e.cover_covariance
                                    : c.statistic == "two_point"      ? e.two_point
                                                                      : e.radius_tail;
    if (!c.ok()) {
      Verdict v;
      v.rule = "pointwise";
      v.model = c.model;
      v.statistic = c.statistic;
      v.skipped = true;
      v.detail = c.error;
      report.verdicts.push_back(v);
      continue;
    }
    add_group(compare_curves(c, est));
  }

  // Long-range decay table from the analytic curves.
  const RadiusLaw law = config.make_law();
  if (!is_pareto(law)) {
    Verdict v;
    v.rule = "slope";
    v.model = "all";
    v.statistic = "all";
    v.skipped = true;
    v.detail = "decay table needs a Pareto radius law";
    report.verdicts.push_back(v);
    return report;
  }
  for (const Curve& c : asymptotic) {
    if (c.statistic == "retention") continue;
    const Statistic stat = statistic_of(c.statistic);
    const bool tail = stat == Statistic::radius_tail;
    const double lo = tail ? config.tail_fit_lo : config.fit_lo;
    const double hi = tail ? config.tail_fit_hi : config.fit_hi;
    const DecayClass expected = decay_class(c.model, stat, law.alpha(), config.dimension);
    if (expected.kind == DecayClass::Kind::zero) {
      // Germs of the unthinned model are Poisson; test the estimate instead.
      std::vector<ComparisonRow> rows;
      for (const auto& r : report.rows)
        if (r.model == c.model && r.statistic == c.statistic) rows.push_back(r);
      Verdict v = pointwise_verdict(rows, config.z_threshold);
      v.rule = "zero";
      v.detail = "empirical two-point correlation against 0: " + v.detail;
      report.verdicts.push_back(v);
      continue;
    }
    AsymptoticLaw bound;
    if (expected.kind == DecayClass::Kind::exponential && c.model != "original") {
      const ThinnedModel m(config.model(parse_kernel(c.model)), options);
      bound = asymptotic_prediction(m, stat);
    }
    report.verdicts.push_back(decay_verdict(c, expected, bound, lo, hi, config.slope_tolerance));
    if (expected.kind == DecayClass::Kind::power)
      report.verdicts.push_back(amplitude_verdict(c, lo, hi, config.amplitude_tolerance));
  }
  return report;
}

void write_report_csv(std::ostream& os, const ComparisonReport& report, std::span<const std::string> header_lines) {
  for (const auto& line : header_lines) os << "# " << line << '\n';
  os << "statistic,model,lag,analytic,empirical,stderr,asymptotic,z\n";
  for (const auto& r : report.rows)
    os << r.statistic << ',' << r.model << ',' << format_double(r.lag) << ',' << format_double(r.analytic) << ','
       << format_double(r.empirical) << ',' << format_double(r.std_error) << ',' << format_double(r.asymptotic)
       << ',' << format_double(r.z) << '\n';
}

std::string verdicts_json(const ComparisonReport& report, const std::string& hash) {
  json out;
  out["config_hash"] = hash;
  out["all_pass"] = report.all_pass();
  json list = json::array();
  for (const auto& v : report.verdicts)
    list.push_back({{"rule", v.rule},
                    {"model", v.model},
                    {"statistic", v.statistic},
                    {"result", v.skipped ? "skipped" : (v.pass ? "pass" : "fail")},
                    {"detail", v.detail}});
  out["verdicts"] = list;
  return out.dump(2) + "\n";
}

namespace {

using Clock = std::chrono::steady_clock;

void write_metadata(const std::filesystem::path& dir, const ExperimentConfig& config, const std::string& command,
                    Clock::time_point start, int jobs) {
  json meta;
  meta["command"] = command;
  meta["config_hash"] = config_hash(config);
  meta["jobs"] = jobs;
  meta["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

void write_config_copy(const std::filesystem::path& dir, const ExperimentConfig& config) {
  write_text(dir / "config.txt", "# config_hash=" + config_hash(config) + "\n" + emit_config(config));
}

json models_json(const SimulationResult& sim) {
  json models = json::array();
  for (const auto& m : sim.models)
    models.push_back({{"model", m.model},
                      {"core_count", estimate_json(m.count)},
                      {"intensity", estimate_json(m.intensity)},
                      {"volume_fraction", estimate_json(m.volume_fraction)}});
  return models;
}

json window_json(const SimulationResult& sim) {
  const Window& w = sim.window;
  const auto sides = w.core_sides();
  return {{"core", std::vector<double>(sides.begin(), sides.begin() + w.d)},
          {"margin", w.margin},
          {"margin_capped", sim.margin_capped},
          {"bias_bound", sim.bias_bound},
          {"expected_count", sim.expected_count}};
}

void write_estimates(const std::filesystem::path& dir, const ExperimentConfig& config, const SimulationResult& sim) {
  const auto lines = header(config, "estimate");
  for (const auto& m : sim.models) {
    const std::pair<const char*, const CovarianceEstimate*> items[] = {{"cover_covariance", &m.cover_covariance},
                                                                        {"two_point", &m.two_point},
                                                                        {"radius_tail", &m.radius_tail}};
    for (const auto& [stat, est] : items) {
      auto os = open_output(dir / (m.model + "_" + stat + ".csv"));
      std::vector<std::string> h = lines;
      h.push_back(std::string("model=") + m.model + " statistic=" + stat);
      write_estimate_csv(os, *est, h);
    }
  }
}

json fit_json(const Curve& c, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t j = 0; j < c.x.size(); ++j)
    if (c.x[j] >= lo && c.x[j] <= hi && c.y[j] > 0.0) {
      x.push_back(c.x[j]);
      y.push_back(c.y[j]);
    }
  if (x.size() < 2) return nullptr;
  return json::parse(tail_fit_json(fit_tail_exponent(x, y, lo, hi)));
}

}  // namespace

int run_simulate(const ExperimentConfig& config, int jobs, std::ostream& log) {
  const auto start = Clock::now();
  config.validate();
  const std::filesystem::path dir = config.output_dir;
  const std::vector<WeightKernel> kernels = config.kernels();
  const auto lines = header(config, "simulate");
  write_config_copy(dir, config);

  auto sink = [&](std::size_t rep, const BooleanSample& original, const std::vector<ThinnedSample>& thinned) {
    const bool write = config.grain_files == "all" || (config.grain_files == "first" && rep == 0);
    if (!write) return;
    char stem[32];
    std::snprintf(stem, sizeof stem, "rep%04zu_", rep);
    {
      auto os = open_output(dir / "grains" / (std::string(stem) + "original.csv"));
      write_grain_csv(os, original, {}, original.kernel, lines);
    }
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      auto os = open_output(dir / "grains" / (std::string(stem) + to_string(kernels[k]) + ".csv"));
      const auto flags = retained_flags(thinned[k]);
      write_grain_csv(os, original, flags, kernels[k], lines);
    }
  };
  const SimulationResult sim = simulate_and_estimate(config, jobs, sink);

  json summary;
  summary["config_hash"] = config_hash(config);
  summary["seed"] = config.seed;
  summary["replications"] = config.replications;
  summary["dimension"] = config.dimension;
  summary["lambda"] = config.lambda;
  summary["law"] = config.make_law().describe();
  summary["window"] = window_json(sim);
  summary["models"] = models_json(sim);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_estimates(dir / "estimates", config, sim);
  write_metadata(dir, config, "simulate", start, jobs);

  log << "simulated " << config.replications << " replications into " << dir.string() << "\n";
  for (const auto& m : sim.models)
    log << "  " << m.model << ": intensity " << m.intensity.mean << " +- " << m.intensity.std_error
        << ", volume fraction " << m.volume_fraction.mean << " +- " << m.volume_fraction.std_error << "\n";
  if (sim.margin_capped)
    log << "  margin capped at " << sim.window.margin << "; bias bound " << sim.bias_bound << " exceeds epsilon\n";
  return 0;
}

int run_analytic(const ExperimentConfig& config, int jobs, std::ostream& log) {
  const auto start = Clock::now();
  config.validate();
  const std::filesystem::path dir = config.output_dir;
  write_config_copy(dir, config);
  const std::vector<Curve> curves = analytic_curves(config, config.analytic_lags, config.analytic_radius_grid, jobs);

  const AnalyticsOptions options = config.analytics_options();
  const RadiusLaw law = config.make_law();
  json summary;
  summary["config_hash"] = config_hash(config);
  summary["dimension"] = config.dimension;
  summary["lambda"] = config.lambda;
  summary["law"] = law.describe();
  const ThinnedModel base(config.model(config.kernels().front()), options);
  summary["p"] = base.boolean_volume_fraction();
  summary["c_alpha_d"] = is_pareto(law) ? json(base.c_alpha_d()) : json(nullptr);
  json models = json::array();
  for (WeightKernel k : config.kernels()) {
    const ThinnedModel m(config.model(k), options);
    models.push_back(
        {{"model", to_string(k)}, {"lambda_th", m.thinned_intensity()}, {"p_th", m.thinned_volume_fraction()}});
  }
  summary["models"] = models;

  json list = json::array();
  std::size_t failed = 0;
  for (const Curve& c : curves) {
    json entry{{"model", c.model}, {"statistic", c.statistic}};
    if (!c.ok()) {
      ++failed;
      entry["error"] = c.error;
      log << "  " << c.model << " " << c.statistic << ": " << c.error << "\n";
      list.push_back(entry);
      continue;
    }
    const std::string tol = "tolerance single=" + format_double(options.single.rel) +
                            " nested=" + format_double(options.nested.rel) +
                            " inner=" + format_double(options.inner.rel);
    std::vector<std::string> lines = header(config, "analytic");
    lines.push_back("model=" + c.model + " statistic=" + c.statistic);
    lines.push_back(tol);
    {
      auto os = open_output(dir / curve_file(c));
      write_curve_csv(os, c.x, c.y, lines);
    }
    entry["file"] = curve_file(c);
    const bool has_asymptote = std::any_of(c.asymptote.begin(), c.asymptote.end(), [](double v) { return std::isfinite(v); });
    if (has_asymptote) {
      lines.push_back("asymptote: " + c.asymptote_note);
      const std::string file = c.model + "_" + c.statistic + "_asymptote.csv";
      auto os = open_output(dir / file);
      write_curve_csv(os, c.x, c.asymptote, lines);
      entry["asymptote_file"] = file;
      entry["asymptote"] = c.asymptote_note;
    }
    if (c.statistic != "retention") {
      const bool tail = c.statistic == "radius_tail";
      entry["fit"] = fit_json(c, tail ? config.tail_fit_lo : config.fit_lo, tail ? config.tail_fit_hi : config.fit_hi);
    }
    list.push_back(entry);
  }
  summary["curves"] = list;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_metadata(dir, config, "analytic", start, jobs);
  log << "wrote " << (curves.size() - failed) << " curves to " << dir.string();
  if (failed) log << " (" << failed << " unavailable)";
  log << "\n";
  return 0;
}

int run_compare(const ExperimentConfig& config, int jobs, std::ostream& log) {
  const auto start = Clock::now();
  config.validate();
  const std::filesystem::path dir = config.output_dir;
  write_config_copy(dir, config);
  const SimulationResult sim = simulate_and_estimate(config, jobs);
  const std::vector<Curve> pointwise = analytic_curves(config, config.lags, config.radius_grid, jobs);
  const std::vector<Curve> asymptotic =
      analytic_curves(config, config.analytic_lags, config.analytic_radius_grid, jobs);
  const ComparisonReport report = build_report(config, sim, pointwise, asymptotic);

  {
    auto os = open_output(dir / "report.csv");
    write_report_csv(os, report, header(config, "compare"));
  }
  write_text(dir / "verdicts.json", verdicts_json(report, config_hash(config)));
  write_estimates(dir / "estimates", config, sim);
  write_metadata(dir, config, "compare", start, jobs);

  std::size_t pass = 0, fail = 0, skipped = 0;
  for (const auto& v : report.verdicts) {
    if (v.skipped) {
      ++skipped;
    } else if (v.pass) {
      ++pass;
    } else {
      ++fail;
      log << "  FAIL " << v.rule << " " << v.model << " " << v.statistic << ": " << v.detail << "\n";
    }
  }
  log << pass << " pass, " << fail << " fail, " << skipped << " skipped; report in " << dir.string() << "\n";
  return fail == 0 ? 0 : 3;
}

int run_fit_tail(const std::filesystem::path& input, double lo, double hi, const std::filesystem::path& output,
                 std::ostream& log) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot read " + input.string());
  std::vector<double> x, y;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("lag,", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
      throw std::runtime_error("malformed row in " + input.string() + ": " + line);
    x.push_back(std::stod(a));
    y.push_back(std::stod(b));
  }
  const TailFit fit = fit_tail_exponent(x, y, lo, hi);
  const std::string text = tail_fit_json(fit);
  if (!output.empty()) write_text(output, text + "\n");
  log << text << "\n";
  return 0;
}

}  // namespace hardcore
