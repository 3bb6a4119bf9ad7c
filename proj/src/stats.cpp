#include "lfp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace lfp {

std::string_view to_string(DistributionFamily family) {
  switch (family) {
    case DistributionFamily::beta: return "beta";
    case DistributionFamily::weibull: return "weibull";
    case DistributionFamily::lognormal: return "lognormal";
  }
  return "?";
}

DistributionFamily parse_family(std::string_view text) {
  if (text == "beta") return DistributionFamily::beta;
  if (text == "weibull") return DistributionFamily::weibull;
  if (text == "lognormal") return DistributionFamily::lognormal;
  throw Error(ErrorKind::usage, "unknown distribution family '" + std::string(text) + "'");
}

double aic(double log_likelihood, int parameters) { return 2.0 * parameters - 2.0 * log_likelihood; }

double bic(double log_likelihood, std::size_t n, int parameters) {
  return parameters * std::log(static_cast<double>(n)) - 2.0 * log_likelihood;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw NumericError("mean of an empty sample");
  // Offsets from the first value keep a constant sample's mean exact.
  const double ref = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - ref;
  return ref + offset / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

// ------------------------------------------------------------ distributions

double DistributionFit::cdf(double x) const {
  switch (family) {
    case DistributionFamily::beta:
      return boost::math::cdf(boost::math::beta_distribution<>(params.first, params.second),
                              std::clamp(x, 0.0, 1.0));
    case DistributionFamily::weibull:
      return x <= 0 ? 0.0
                    : boost::math::cdf(boost::math::weibull_distribution<>(params.first, params.second), x);
    case DistributionFamily::lognormal:
      return x <= 0 ? 0.0
                    : boost::math::cdf(boost::math::lognormal_distribution<>(params.first, params.second), x);
  }
  return 0.0;
}

double DistributionFit::quantile(double p) const {
  switch (family) {
    case DistributionFamily::beta:
      return boost::math::quantile(boost::math::beta_distribution<>(params.first, params.second), p);
    case DistributionFamily::weibull:
      return boost::math::quantile(boost::math::weibull_distribution<>(params.first, params.second), p);
    case DistributionFamily::lognormal:
      return boost::math::quantile(boost::math::lognormal_distribution<>(params.first, params.second), p);
  }
  return 0.0;
}

double DistributionFit::pdf(double x) const {
  switch (family) {
    case DistributionFamily::beta:
      return (x <= 0 || x >= 1)
                 ? 0.0
                 : boost::math::pdf(boost::math::beta_distribution<>(params.first, params.second), x);
    case DistributionFamily::weibull:
      return x < 0 ? 0.0
                   : boost::math::pdf(boost::math::weibull_distribution<>(params.first, params.second), x);
    case DistributionFamily::lognormal:
      return x <= 0 ? 0.0
                    : boost::math::pdf(boost::math::lognormal_distribution<>(params.first, params.second), x);
  }
  return 0.0;
}

// ----------------------------------------------------------------- fitting

namespace {

constexpr int kMaxIterations = 500;
constexpr double kLogLikelihoodTolerance = 1e-9;

DistributionFit finish(DistributionFamily family, double a, double b, double ll, std::size_t n) {
  return {family, {a, b}, ll, aic(ll), bic(ll, n), n};
}

double weibull_log_likelihood(std::span<const double> x, double shape, double scale) {
  double ll = 0.0;
  for (double v : x) {
    const double z = v / scale;
    ll += std::log(shape / scale) + (shape - 1.0) * std::log(z) - std::pow(z, shape);
  }
  return ll;
}

DistributionFit fit_weibull(std::span<const double> x) {
  const std::size_t n = x.size();
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(x[i] / top);
  const double mean_log = mean(logs);

  // Profile score in the shape k; strictly decreasing with a single root.
  auto score = [&](double k, double* slope) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double l : logs) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    if (slope) *slope = -1.0 / (k * k) - (s2 * s0 - s1 * s1) / (s0 * s0);
    return 1.0 / k + mean_log - s1 / s0;
  };
  auto scale_for = [&](double k) {
    double s0 = 0.0;
    for (double l : logs) s0 += std::exp(k * l);
    return top * std::pow(s0 / static_cast<double>(n), 1.0 / k);
  };

  double lo = 1e-3, hi = 1.0;
  while (score(lo, nullptr) < 0 && lo > 1e-12) lo *= 0.1;
  while (score(hi, nullptr) > 0 && hi < 1e8) hi *= 2.0;

  const double sd_log = stddev(logs);
  double k = std::clamp(sd_log > 0 ? 1.2 / sd_log : 1.0, lo, hi);
  double ll = weibull_log_likelihood(x, k, scale_for(k));
  DistributionFit best = finish(DistributionFamily::weibull, k, scale_for(k), ll, n);
  for (int it = 0; it < kMaxIterations; ++it) {
    double slope = 0.0;
    const double g = score(k, &slope);
    if (g > 0) lo = k; else hi = k;
    double next = k - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double next_ll = weibull_log_likelihood(x, next, scale_for(next));
    const double step = std::abs(next - k);
    k = next;
    const double delta = std::abs(next_ll - ll);
    ll = next_ll;
    best = finish(DistributionFamily::weibull, k, scale_for(k), ll, n);
    if (delta < kLogLikelihoodTolerance && step <= 1e-10 * k) return best;
    if (step <= 1e-14 * k) return best;
  }
  throw FitError("weibull fit did not converge", best);
}

DistributionFit fit_lognormal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> logs(n);
  std::transform(x.begin(), x.end(), logs.begin(), [](double v) { return std::log(v); });
  const double mu = mean(logs);
  const double sigma = stddev(logs);
  if (!(sigma > 0)) throw NumericError("lognormal fit: zero variance in log values");
  const double sum_log = std::accumulate(logs.begin(), logs.end(), 0.0);
  const double nn = static_cast<double>(n);
  const double ll = -sum_log - nn * std::log(sigma) - 0.5 * nn * std::log(2.0 * std::numbers::pi) -
                    0.5 * nn;
  return finish(DistributionFamily::lognormal, mu, sigma, ll, n);
}

DistributionFit fit_beta(std::span<const double> x) {
  using boost::math::digamma;
  using boost::math::trigamma;
  const std::size_t n = x.size();
  const double nn = static_cast<double>(n);
  double sum_log = 0.0, sum_log1m = 0.0;
  for (double v : x) {
    sum_log += std::log(v);
    sum_log1m += std::log1p(-v);
  }
  auto log_likelihood = [&](double a, double b) {
    return (a - 1.0) * sum_log + (b - 1.0) * sum_log1m - nn * std::log(boost::math::beta(a, b));
  };

  const double m = mean(x);
  const double sd = stddev(x);
  const double c = m * (1.0 - m) / (sd * sd) - 1.0;
  double a = c > 0 ? m * c : 1.0;
  double b = c > 0 ? (1.0 - m) * c : 1.0;
  double ll = log_likelihood(a, b);

  for (int it = 0; it < kMaxIterations; ++it) {
    const double ab = digamma(a + b);
    const double g1 = nn * (ab - digamma(a)) + sum_log;
    const double g2 = nn * (ab - digamma(b)) + sum_log1m;
    const double t = nn * trigamma(a + b);
    const double h11 = t - nn * trigamma(a);
    const double h22 = t - nn * trigamma(b);
    const double h12 = t;
    const double det = h11 * h22 - h12 * h12;
    double da = -(h22 * g1 - h12 * g2) / det;
    double db = -(h11 * g2 - h12 * g1) / det;

    // Newton step on a concave objective; halve until it stays positive and
    // does not lose likelihood.
    double step = 1.0;
    double na = a, nb = b, nll = ll;
    for (int h = 0; h < 60; ++h, step *= 0.5) {
      na = a + step * da;
      nb = b + step * db;
      if (na <= 0 || nb <= 0) continue;
      nll = log_likelihood(na, nb);
      if (nll >= ll - 1e-12) break;
    }
    if (na <= 0 || nb <= 0) break;
    const double delta = std::abs(nll - ll);
    const double move = std::max(std::abs(na - a) / a, std::abs(nb - b) / b);
    a = na;
    b = nb;
    ll = nll;
    if (delta < kLogLikelihoodTolerance && move < 1e-8) {
      return finish(DistributionFamily::beta, a, b, ll, n);
    }
  }
  throw FitError("beta fit did not converge", finish(DistributionFamily::beta, a, b, ll, n));
}

}  // namespace

DistributionFit fit_distribution(std::span<const double> values, DistributionFamily family) {
  if (values.size() < 8) {
    throw NumericError("distribution fit needs at least 8 values, got " + std::to_string(values.size()));
  }
  std::vector<double> x(values.begin(), values.end());
  for (double& v : x) {
    if (!std::isfinite(v) || v < 0.0) throw NumericError("fit values must be finite and non-negative");
    if (family == DistributionFamily::beta) {
      if (v > 1.0) throw NumericError("beta fit values must lie in [0,1]");
      v = std::clamp(v, kFitClamp, 1.0 - kFitClamp);
    } else {
      v = std::max(v, kFitClamp);
    }
  }
  if (!(stddev(x) > 0)) throw NumericError("degenerate sample: zero variance");
  switch (family) {
    case DistributionFamily::beta: return fit_beta(x);
    case DistributionFamily::weibull: return fit_weibull(x);
    case DistributionFamily::lognormal: return fit_lognormal(x);
  }
  throw NumericError("unknown family");
}

// ----------------------------------------------------------------- density

double DensityCurve::integral() const {
  double total = 0.0;
  if (kind == Kind::histogram) {
    for (std::size_t i = 0; i < density.size(); ++i) total += density[i] * (grid[i + 1] - grid[i]);
  } else {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      total += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    }
  }
  return total;
}

DensityCurve empirical_density(std::span<const double> values, const DensityOptions& options) {
  if (values.empty()) throw NumericError("density of an empty sample");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  DensityCurve curve;
  curve.kind = options.kind;

  if (options.kind == DensityCurve::Kind::histogram) {
    double lo = *min_it, hi = *max_it;
    std::size_t bins = std::max<std::size_t>(1, options.bins);
    if (options.range) {
      std::tie(lo, hi) = *options.range;
      if (!(hi > lo)) throw NumericError("histogram range must have hi > lo");
    } else if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
      bins = 1;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    curve.grid.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) curve.grid[i] = lo + width * static_cast<double>(i);
    curve.grid.back() = hi;
    std::vector<std::size_t> counts(bins, 0);
    std::size_t inside = 0;
    for (double v : values) {
      if (v < lo || v > hi) continue;
      const auto b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
      ++counts[b];
      ++inside;
    }
    if (inside == 0) throw NumericError("no values inside the histogram range");
    curve.density.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      curve.density[i] = static_cast<double>(counts[i]) /
                         (static_cast<double>(inside) * (curve.grid[i + 1] - curve.grid[i]));
    }
    return curve;
  }

  if (values.size() < 2) throw NumericError("kernel density needs at least 2 values");
  double h = 0.0;
  if (options.bandwidth) {
    h = *options.bandwidth;
  } else {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) {
      const double pos = p * static_cast<double>(sorted.size() - 1);
      const auto i = static_cast<std::size_t>(pos);
      const auto j = std::min(i + 1, sorted.size() - 1);
      return sorted[i] + (pos - static_cast<double>(i)) * (sorted[j] - sorted[i]);
    };
    const double iqr = q(0.75) - q(0.25);
    double spread = stddev(values);
    if (iqr > 0) spread = std::min(spread, iqr / 1.34);
    h = 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
  }
  if (!(h > 0)) h = 1e-3 * std::max(1.0, std::abs(*min_it));
  const std::size_t points = std::max<std::size_t>(options.grid_points, 16);
  const double lo = *min_it - 6.0 * h, hi = *max_it + 6.0 * h;
  curve.grid.resize(points);
  curve.density.assign(points, 0.0);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    curve.grid[i] = x;
    double s = 0.0;
    for (double v : values) {
      const double z = (x - v) / h;
      s += std::exp(-0.5 * z * z);
    }
    curve.density[i] = s * norm;
  }
  // Renormalize against the quadrature so the curve integrates to one.
  const double total = curve.integral();
  for (double& d : curve.density) d /= total;
  return curve;
}

double density_l1(const DensityCurve& a, const DensityCurve& b) {
  if (a.kind != DensityCurve::Kind::histogram || b.kind != DensityCurve::Kind::histogram ||
      a.grid != b.grid) {
    throw NumericError("density_l1 needs two histograms over identical bins");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    total += std::abs(a.density[i] - b.density[i]) * (a.grid[i + 1] - a.grid[i]);
  }
  return total;
}

// ----------------------------------------------------- correlation & lines

double autocorrelation(std::span<const double> series, std::size_t lag) {
  if (series.size() <= lag) {
    throw NumericError("autocorrelation: series length " + std::to_string(series.size()) +
                       " must exceed lag " + std::to_string(lag));
  }
  const double m = mean(series);
  double denom = 0.0;
  for (double v : series) denom += (v - m) * (v - m);
  if (!(denom > 0)) throw NumericError("autocorrelation undefined: zero variance series");
  if (lag == 0) return 1.0;
  // Mean lagged product over the n - k pairs, divided by the variance.
  double num = 0.0;
  const std::size_t pairs = series.size() - lag;
  for (std::size_t i = 0; i < pairs; ++i) num += (series[i] - m) * (series[i + lag] - m);
  const double rho = (num / static_cast<double>(pairs)) / (denom / static_cast<double>(series.size()));
  return std::clamp(rho, -1.0, 1.0);
}

namespace {

struct Moments {
  double sxx = 0.0, syy = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
};

Moments moments(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw NumericError("paired data of unequal length");
  if (xs.size() < 2) throw NumericError("need at least 2 points");
  Moments m;
  m.mx = mean(xs);
  m.my = mean(ys);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - m.mx, dy = ys[i] - m.my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const Moments m = moments(xs, ys);
  if (!(m.sxx > 0) || !(m.syy > 0)) throw NumericError("pearson undefined: zero variance");
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  const Moments m = moments(xs, ys);
  if (!(m.sxx > 0)) throw NumericError("regression undefined: zero variance in x");
  const double slope = m.sxy / m.sxx;
  return {slope, m.my - slope * m.mx};
}

ProbabilityPlots qq_pp_data(std::span<const double> values, const DistributionFit& fit) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  ProbabilityPlots plots;
  plots.qq.reserve(sorted.size());
  plots.pp.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    plots.qq.emplace_back(fit.quantile((rank - 0.5) / n), sorted[i]);
    plots.pp.emplace_back(std::clamp(fit.cdf(sorted[i]), 0.0, 1.0), rank / n);
  }
  return plots;
}

void write_fit_report_csv(std::ostream& out, std::span<const DistributionFit> fits) {
  const auto old_precision = out.precision(17);
  out << "metric";
  for (const auto& f : fits) out << ',' << to_string(f.family);
  out << "\nlog_likelihood";
  for (const auto& f : fits) out << ',' << f.log_likelihood;
  out << "\naic";
  for (const auto& f : fits) out << ',' << f.aic;
  out << "\nbic";
  for (const auto& f : fits) out << ',' << f.bic;
  out << '\n';
  out.precision(old_precision);
}

nlohmann::ordered_json fit_report_json(std::span<const DistributionFit> fits) {
  nlohmann::ordered_json j;
  for (const char* row : {"log_likelihood", "aic", "bic"}) j[row] = nlohmann::ordered_json::object();
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& f : fits) {
    const std::string name(to_string(f.family));
    j["log_likelihood"][name] = f.log_likelihood;
    j["aic"][name] = f.aic;
    j["bic"][name] = f.bic;
    params[name] = {f.params.first, f.params.second};
  }
  j["params"] = std::move(params);
  if (!fits.empty()) j["n"] = fits.front().n;
  return j;
}

}  // namespace lfp
