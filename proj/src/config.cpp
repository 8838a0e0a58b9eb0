#include "hardcore/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hardcore/geometry.hpp"

namespace hardcore {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field number(const char* key, T ExperimentConfig::*member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>)
              c.*member = to_double(key, v);
            else
              c.*member = static_cast<T>(to_integer(key, v));
          },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return format_double(c.*member);
            else
              return std::to_string(c.*member);
          }};
}

Field text(const char* key, std::string ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

Field grid(const char* key, std::vector<double> ExperimentConfig::*member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            try {
              c.*member = parse_grid(v);
            } catch (const std::exception& e) {
              throw ConfigError(key, e.what());
            }
          },
          [member](const ExperimentConfig& c) { return join(c.*member); }};
}

// "auto" maps to -1 for the optional window lengths.
Field optional_length(const char* key, double ExperimentConfig::*member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = v == "auto" ? -1.0 : to_double(key, v);
          },
          [member](const ExperimentConfig& c) {
            return c.*member < 0.0 ? std::string("auto") : format_double(c.*member);
          }};
}

Field seed_field() {
  return {"run.seed",
          [](ExperimentConfig& c, const std::string& v) {
            std::uint64_t s = 0;
            const char* end = v.data() + v.size();
            auto [ptr, ec] = std::from_chars(v.data(), end, s);
            if (ec != std::errc() || ptr != end) throw ConfigError("run.seed", "expected an unsigned integer");
            c.seed = s;
          },
          [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      number("model.lambda", &ExperimentConfig::lambda),
      number("model.dimension", &ExperimentConfig::dimension),
      text("model.law", &ExperimentConfig::law),
      number("model.alpha", &ExperimentConfig::alpha),
      number("model.scale", &ExperimentConfig::scale),
      number("model.radius", &ExperimentConfig::radius),
      text("model.table", &ExperimentConfig::table),
      text("model.kernel", &ExperimentConfig::kernel),
      grid("window.core", &ExperimentConfig::core),
      optional_length("window.margin", &ExperimentConfig::margin),
      number("window.epsilon", &ExperimentConfig::epsilon),
      optional_length("window.max_margin", &ExperimentConfig::max_margin),
      number("run.replications", &ExperimentConfig::replications),
      seed_field(),
      grid("estimate.lags", &ExperimentConfig::lags),
      grid("estimate.radius_grid", &ExperimentConfig::radius_grid),
      number("estimate.probes", &ExperimentConfig::probes),
      number("estimate.volume_probes", &ExperimentConfig::volume_probes),
      number("estimate.bandwidth", &ExperimentConfig::bandwidth),
      grid("analytic.lags", &ExperimentConfig::analytic_lags),
      grid("analytic.radius_grid", &ExperimentConfig::analytic_radius_grid),
      number("analytic.fit_lo", &ExperimentConfig::fit_lo),
      number("analytic.fit_hi", &ExperimentConfig::fit_hi),
      number("analytic.tail_fit_lo", &ExperimentConfig::tail_fit_lo),
      number("analytic.tail_fit_hi", &ExperimentConfig::tail_fit_hi),
      number("tolerance.single_rel", &ExperimentConfig::single_rel),
      number("tolerance.nested_rel", &ExperimentConfig::nested_rel),
      number("tolerance.inner_rel", &ExperimentConfig::inner_rel),
      number("tolerance.z_threshold", &ExperimentConfig::z_threshold),
      number("tolerance.slope", &ExperimentConfig::slope_tolerance),
      number("tolerance.amplitude", &ExperimentConfig::amplitude_tolerance),
      text("output.dir", &ExperimentConfig::output_dir),
      text("output.grain_files", &ExperimentConfig::grain_files),
  };
  return table;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void require_grid(const std::vector<double>& g, const char* field, bool allow_zero) {
  require(!g.empty(), field, "must not be empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(std::isfinite(g[i]) && (allow_zero ? g[i] >= 0.0 : g[i] > 0.0), field,
            allow_zero ? "values must be finite and >= 0" : "values must be finite and > 0");
    require(i == 0 || g[i] > g[i - 1], field, "values must be strictly increasing");
  }
}

}  // namespace

std::vector<double> parse_grid(std::string_view raw) {
  const std::string s = trim(raw);
  std::vector<double> out;
  if (s.rfind("log:", 0) == 0 || s.rfind("lin:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(trim(part));
    if (parts.size() != 4) throw std::invalid_argument("grid spec must be kind:lo:hi:n");
    const double lo = to_double("grid", parts[1]), hi = to_double("grid", parts[2]);
    const long long n = to_integer("grid", parts[3]);
    if (n < 1) throw std::invalid_argument("grid needs n >= 1");
    const bool log = parts[0] == "log";
    if (log && !(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("log grid needs positive ends");
    for (long long i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
    }
    if (n > 1) out.back() = hi;
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) throw std::invalid_argument("empty list entry");
    out.push_back(to_double("list", t));
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::stringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number), "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given twice");
    it->set(c, value);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(c) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : emit_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RadiusLaw ExperimentConfig::make_law() const {
  try {
    if (law == "pareto") return RadiusLaw::pareto(alpha, scale);
    if (law == "deterministic") return RadiusLaw::deterministic(radius);
    if (law == "tabulated") return RadiusLaw::load_table(table);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(law == "tabulated" ? "model.table" : "model.law", e.what());
  }
  throw ConfigError("model.law", "expected pareto, deterministic or tabulated, got '" + law + "'");
}

std::vector<WeightKernel> ExperimentConfig::kernels() const {
  if (kernel == "all") return {kAllKernels.begin(), kAllKernels.end()};
  try {
    return {parse_kernel(kernel)};
  } catch (const std::exception& e) {
    throw ConfigError("model.kernel", e.what());
  }
}

ModelSpec ExperimentConfig::model(WeightKernel k) const {
  ModelSpec s{lambda, make_law(), k, dimension};
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
  return s;
}

AnalyticsOptions ExperimentConfig::analytics_options() const {
  AnalyticsOptions o;
  o.single.rel = single_rel;
  o.nested.rel = nested_rel;
  o.inner.rel = inner_rel;
  return o;
}

Window ExperimentConfig::core_window() const {
  Window w;
  w.d = dimension;
  for (int i = 0; i < dimension; ++i) w.high[i] = core.size() == 1 ? core[0] : core[static_cast<std::size_t>(i)];
  return w;
}

Window ExperimentConfig::window() const {
  Window w = core_window();
  if (margin >= 0.0) {
    w.margin = margin;
    return w;
  }
  const auto sides = w.core_sides();
  const double cap = max_margin >= 0.0 ? max_margin : *std::max_element(sides.begin(), sides.begin() + dimension);
  w.margin = default_margin(lambda, make_law(), w, epsilon, cap).margin;
  return w;
}

ExperimentConfig ExperimentConfig::quick() const {
  ExperimentConfig q = *this;
  q.replications = std::max(2, replications / 10);
  const double shrink = std::pow(10.0, -1.0 / dimension);
  for (double& side : q.core) side *= shrink;
  return q;
}

void ExperimentConfig::validate() const {
  require(std::isfinite(lambda) && lambda > 0.0, "model.lambda", "must be positive");
  require(dimension >= 1 && dimension <= kMaxSimulationDimension, "model.dimension", "must be 1, 2 or 3");
  const RadiusLaw f = make_law();
  require(f.has_finite_moment(dimension), law == "pareto" ? "model.alpha" : "model.law",
          "radius moment of order d must be finite (alpha > d)");
  const auto ks = kernels();
  if (std::find(ks.begin(), ks.end(), WeightKernel::small) != ks.end())
    require(f.atom(0.0) == 0.0, "model.kernel", "small kernel needs radii > 0");

  require(core.size() == 1 || core.size() == static_cast<std::size_t>(dimension), "window.core",
          "give one side or one side per dimension");
  double shortest = kInfinity;
  for (double side : core) {
    require(std::isfinite(side) && side > 0.0, "window.core", "sides must be positive");
    shortest = std::min(shortest, side);
  }
  require(margin < 0.0 || std::isfinite(margin), "window.margin", "must be finite or auto");
  require(std::isfinite(epsilon) && epsilon > 0.0, "window.epsilon", "must be positive");
  require(max_margin < 0.0 || std::isfinite(max_margin), "window.max_margin", "must be finite or auto");

  require(replications >= 1, "run.replications", "must be at least 1");

  require_grid(lags, "estimate.lags", true);
  require(2.0 * lags.back() < shortest, "estimate.lags", "largest lag must be below half the shortest core side");
  require_grid(radius_grid, "estimate.radius_grid", true);
  require(probes >= 1, "estimate.probes", "must be at least 1");
  require(volume_probes >= 1, "estimate.volume_probes", "must be at least 1");
  require(std::isfinite(bandwidth) && bandwidth > 0.0, "estimate.bandwidth", "must be positive");
  require(lags.back() + bandwidth < shortest, "estimate.bandwidth", "largest lag plus bandwidth must fit in the core");

  require_grid(analytic_lags, "analytic.lags", true);
  require_grid(analytic_radius_grid, "analytic.radius_grid", true);
  require(fit_lo > 0.0 && fit_hi >= fit_lo, "analytic.fit_lo", "need 0 < fit_lo <= fit_hi");
  require(tail_fit_lo > 0.0 && tail_fit_hi >= tail_fit_lo, "analytic.tail_fit_lo",
          "need 0 < tail_fit_lo <= tail_fit_hi");

  for (auto [v, key] : {std::pair{single_rel, "tolerance.single_rel"}, {nested_rel, "tolerance.nested_rel"},
                        {inner_rel, "tolerance.inner_rel"}})
    require(std::isfinite(v) && v > 0.0 && v < 1.0, key, "must lie in (0, 1)");
  require(std::isfinite(z_threshold) && z_threshold > 0.0, "tolerance.z_threshold", "must be positive");
  require(std::isfinite(slope_tolerance) && slope_tolerance > 0.0, "tolerance.slope", "must be positive");
  require(std::isfinite(amplitude_tolerance) && amplitude_tolerance > 0.0, "tolerance.amplitude",
          "must be positive");

  require(!output_dir.empty(), "output.dir", "must not be empty");
  require(grain_files == "all" || grain_files == "first" || grain_files == "none", "output.grain_files",
          "expected all, first or none");
}

}  // namespace hardcore
