#include "hardcore/radius_law.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hardcore {

RadiusRange RadiusRange::intersect(const RadiusRange& o) const {
  RadiusRange r;
  if (lo > o.lo) {
    r.lo = lo;
    r.lo_closed = lo_closed;
  } else if (o.lo > lo) {
    r.lo = o.lo;
    r.lo_closed = o.lo_closed;
  } else {
    r.lo = lo;
    r.lo_closed = lo_closed && o.lo_closed;
  }
  if (hi < o.hi) {
    r.hi = hi;
    r.hi_closed = hi_closed;
  } else if (o.hi < hi) {
    r.hi = o.hi;
    r.hi_closed = o.hi_closed;
  } else {
    r.hi = hi;
    r.hi_closed = hi_closed && o.hi_closed;
  }
  return r;
}

RadiusLaw RadiusLaw::pareto(double alpha, double scale) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("Pareto tail exponent must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("Pareto scale must be positive");
  return RadiusLaw(Pareto{alpha, scale});
}

RadiusLaw RadiusLaw::deterministic(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("deterministic radius must be positive");
  return RadiusLaw(Deterministic{radius});
}

RadiusLaw RadiusLaw::tabulated(std::vector<double> radii, std::vector<double> cdf) {
  if (radii.size() != cdf.size() || radii.size() < 2)
    throw std::invalid_argument("tabulated law needs at least two (radius, cdf) rows");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0)
      throw std::invalid_argument("tabulated radii must be finite and nonnegative");
    if (!(cdf[i] >= 0.0 && cdf[i] <= 1.0 + 1e-12))
      throw std::invalid_argument("tabulated cdf values must lie in [0, 1]");
    if (i > 0 && !(radii[i] > radii[i - 1] && cdf[i] > cdf[i - 1]))
      throw std::invalid_argument("tabulated radius and cdf columns must be strictly increasing");
  }
  if (std::abs(cdf.back() - 1.0) > 1e-9)
    throw std::invalid_argument("tabulated cdf must end at 1");
  cdf.back() = 1.0;
  return RadiusLaw(Tabulated{std::move(radii), std::move(cdf)});
}

RadiusLaw RadiusLaw::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open radius table " + path.string());
  std::vector<double> radii, cdf;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double r, c;
    if (!(fields >> r)) continue;
    if (!(fields >> c))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    radii.push_back(r);
    cdf.push_back(c);
  }
  return tabulated(std::move(radii), std::move(cdf));
}

RadiusLaw::Kind RadiusLaw::kind() const {
  switch (law_.index()) {
    case 0: return Kind::pareto;
    case 1: return Kind::deterministic;
    default: return Kind::tabulated;
  }
}

std::string RadiusLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* p = std::get_if<Pareto>(&law_))
    os << "pareto(alpha=" << p->alpha << ",scale=" << p->scale << ")";
  else if (const auto* d = std::get_if<Deterministic>(&law_))
    os << "deterministic(radius=" << d->radius << ")";
  else
    os << "tabulated(rows=" << std::get<Tabulated>(law_).radii.size() << ")";
  return os.str();
}

double RadiusLaw::alpha() const {
  if (const auto* p = std::get_if<Pareto>(&law_)) return p->alpha;
  throw std::logic_error("alpha is defined only for Pareto laws");
}

double RadiusLaw::scale() const {
  if (const auto* p = std::get_if<Pareto>(&law_)) return p->scale;
  throw std::logic_error("scale is defined only for Pareto laws");
}

double RadiusLaw::slowly_varying_constant() const {
  return std::pow(scale(), alpha());
}

double RadiusLaw::tail(double r) const {
  if (const auto* p = std::get_if<Pareto>(&law_))
    return r <= p->scale ? 1.0 : std::pow(p->scale / r, p->alpha);
  if (const auto* d = std::get_if<Deterministic>(&law_)) return r < d->radius ? 1.0 : 0.0;
  const auto& t = std::get<Tabulated>(law_);
  if (r < t.radii.front()) return 1.0;
  if (r >= t.radii.back()) return 0.0;
  const auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - t.radii.begin()) - 1;
  const double frac = (r - t.radii[i]) / (t.radii[i + 1] - t.radii[i]);
  return 1.0 - (t.cdf[i] + frac * (t.cdf[i + 1] - t.cdf[i]));
}

double RadiusLaw::upper_quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("upper quantile needs u in (0, 1]");
  if (const auto* p = std::get_if<Pareto>(&law_)) return p->scale * std::pow(u, -1.0 / p->alpha);
  if (const auto* d = std::get_if<Deterministic>(&law_)) return d->radius;
  const auto& t = std::get<Tabulated>(law_);
  const double target = 1.0 - u;
  if (target <= t.cdf.front()) return t.radii.front();
  const auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), target);
  const std::size_t i = static_cast<std::size_t>(it - t.cdf.begin());
  if (i >= t.cdf.size()) return t.radii.back();
  const double frac = (target - t.cdf[i - 1]) / (t.cdf[i] - t.cdf[i - 1]);
  return t.radii[i - 1] + frac * (t.radii[i] - t.radii[i - 1]);
}

double RadiusLaw::sample_size_biased(int k, double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("size-biased draw needs u in (0, 1]");
  if (k == 0) return upper_quantile(u);
  if (const auto* p = std::get_if<Pareto>(&law_)) {
    if (!(p->alpha > k)) throw std::domain_error("size-biased Pareto law has infinite mass");
    // r^k times a Pareto(alpha) density is Pareto(alpha - k) with the same scale.
    return p->scale * std::pow(u, -1.0 / (p->alpha - k));
  }
  if (const auto* d = std::get_if<Deterministic>(&law_)) return d->radius;
  const auto& t = std::get<Tabulated>(law_);
  const double total = partial_moment(k, RadiusRange::all());
  const double target = u * total;
  if (target >= partial_moment(k, RadiusRange::above(t.radii.front()))) return t.radii.front();
  double lo = t.radii.front(), hi = t.radii.back();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (partial_moment(k, RadiusRange::above(mid)) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double RadiusLaw::atom(double r) const {
  if (std::holds_alternative<Pareto>(law_)) return 0.0;
  if (const auto* d = std::get_if<Deterministic>(&law_)) return r == d->radius ? 1.0 : 0.0;
  const auto& t = std::get<Tabulated>(law_);
  return r == t.radii.front() ? t.cdf.front() : 0.0;
}

double RadiusLaw::lower_support() const {
  if (const auto* p = std::get_if<Pareto>(&law_)) return p->scale;
  if (const auto* d = std::get_if<Deterministic>(&law_)) return d->radius;
  return std::get<Tabulated>(law_).radii.front();
}

double RadiusLaw::upper_support() const {
  if (std::holds_alternative<Pareto>(law_)) return kInfinity;
  if (const auto* d = std::get_if<Deterministic>(&law_)) return d->radius;
  return std::get<Tabulated>(law_).radii.back();
}

bool RadiusLaw::has_finite_moment(double p) const {
  if (const auto* par = std::get_if<Pareto>(&law_)) return p < par->alpha;
  if (p >= 0.0) return true;
  return lower_support() > 0.0;
}

namespace {

// Integral of r^p dr over [a, b], 0 <= a <= b.
double power_integral(double p, double a, double b) {
  if (p == -1.0) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

}  // namespace

double RadiusLaw::partial_moment(double p, const RadiusRange& range) const {
  if (range.empty()) return 0.0;
  if (const auto* par = std::get_if<Pareto>(&law_)) {
    const double a = std::max(range.lo, par->scale);
    const double b = range.hi;
    if (!(b > a)) return 0.0;
    if (!std::isfinite(b) && p >= par->alpha)
      throw std::domain_error("moment of order >= alpha diverges for a Pareto law");
    const double c = par->alpha * std::pow(par->scale, par->alpha);
    if (p == par->alpha) return c * std::log(b / a);
    const double e = p - par->alpha;
    // alpha s^alpha (a^e - b^e) / (alpha - p), written to keep precision when a is near b.
    const double ae = std::pow(a, e);
    const double be = std::isfinite(b) ? std::pow(b, e) : 0.0;
    return c * (ae - be) / (-e);
  }
  if (const auto* d = std::get_if<Deterministic>(&law_))
    return range.contains(d->radius) ? std::pow(d->radius, p) : 0.0;

  const auto& t = std::get<Tabulated>(law_);
  double total = 0.0;
  if (t.cdf.front() > 0.0 && range.contains(t.radii.front())) {
    if (t.radii.front() == 0.0 && p < 0.0)
      throw std::domain_error("negative moment diverges with an atom at zero");
    total += t.cdf.front() * std::pow(t.radii.front(), p);
  }
  for (std::size_t i = 0; i + 1 < t.radii.size(); ++i) {
    const double a = std::max(t.radii[i], range.lo);
    const double b = std::min(t.radii[i + 1], range.hi);
    if (!(b > a)) continue;
    if (a == 0.0 && p <= -1.0) throw std::domain_error("negative moment diverges at zero");
    const double density = (t.cdf[i + 1] - t.cdf[i]) / (t.radii[i + 1] - t.radii[i]);
    total += density * power_integral(p, a, b);
  }
  return total;
}

double RadiusLaw::moment_integral(double p, double a) const {
  if (a < 0.0) throw std::domain_error("moment lower limit must be nonnegative");
  if (const auto* par = std::get_if<Pareto>(&law_); par && p >= par->alpha)
    throw std::domain_error("moment of order >= alpha diverges for a Pareto law");
  return partial_moment(p, RadiusRange::above(a, false));
}

double RadiusLaw::karamata_asymptote(double p, double a, double x) const {
  const auto* par = std::get_if<Pareto>(&law_);
  if (!par) throw std::domain_error("Karamata asymptote needs a regularly varying (Pareto) law");
  if (!(p < par->alpha)) throw std::domain_error("Karamata asymptote needs p < alpha");
  if (!(a > 0.0) || !(x > 0.0)) throw std::domain_error("Karamata asymptote needs a, x > 0");
  const double gap = par->alpha - p;
  return (par->alpha / gap) * std::pow(a, -gap) * tail(x) * std::pow(x, p);
}

const std::vector<double>& RadiusLaw::table_radii() const {
  if (const auto* t = std::get_if<Tabulated>(&law_)) return t->radii;
  throw std::logic_error("not a tabulated law");
}

const std::vector<double>& RadiusLaw::table_cdf() const {
  if (const auto* t = std::get_if<Tabulated>(&law_)) return t->cdf;
  throw std::logic_error("not a tabulated law");
}

}  // namespace hardcore
