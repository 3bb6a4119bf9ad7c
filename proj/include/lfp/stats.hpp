#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lfp/error.hpp"
#include "json.hpp"

namespace lfp {

enum class DistributionFamily : std::uint8_t { beta, weibull, lognormal };

std::string_view to_string(DistributionFamily family);
DistributionFamily parse_family(std::string_view text);

inline constexpr int kFitParameters = 2;
/// Endpoint clamp applied before fitting (beta: both ends, others: zero only).
inline constexpr double kFitClamp = 1e-6;

/// Maximum-likelihood fit. params: beta (alpha, beta), weibull (shape,
/// scale), lognormal (mu, sigma).
struct DistributionFit {
  DistributionFamily family = DistributionFamily::weibull;
  std::pair<double, double> params{0.0, 0.0};
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t n = 0;

  double cdf(double x) const;
  double quantile(double p) const;
  double pdf(double x) const;
};

double aic(double log_likelihood, int parameters = kFitParameters);
double bic(double log_likelihood, std::size_t n, int parameters = kFitParameters);

/// Thrown when the optimizer runs out of iterations; carries its best iterate.
class FitError : public NumericError {
 public:
  FitError(const std::string& what, DistributionFit best)
      : NumericError(what), best_(std::move(best)) {}
  const DistributionFit& best() const { return best_; }

 private:
  DistributionFit best_;
};

DistributionFit fit_distribution(std::span<const double> values, DistributionFamily family);

struct DensityCurve {
  enum class Kind : std::uint8_t { histogram, kernel };
  Kind kind = Kind::histogram;
  /// Histogram: bin edges (density.size() + 1). Kernel: evaluation grid.
  std::vector<double> grid;
  std::vector<double> density;

  double integral() const;
};

struct DensityOptions {
  DensityCurve::Kind kind = DensityCurve::Kind::histogram;
  std::size_t bins = 20;
  /// Fixed histogram range; defaults to [min, max] of the data.
  std::optional<std::pair<double, double>> range;
  /// Kernel bandwidth; defaults to Silverman's rule.
  std::optional<double> bandwidth;
  std::size_t grid_points = 512;
};

DensityCurve empirical_density(std::span<const double> values, const DensityOptions& options = {});

/// Integral of |a - b| for two histograms over identical bins.
double density_l1(const DensityCurve& a, const DensityCurve& b);

/// Lag-k autocorrelation with the full-series mean; lag 0 gives 1.
double autocorrelation(std::span<const double> series, std::size_t lag);

double pearson(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit ols_fit(std::span<const double> xs, std::span<const double> ys);

double mean(std::span<const double> values);
/// Population standard deviation (divides by n).
double stddev(std::span<const double> values);

struct ProbabilityPlots {
  std::vector<std::pair<double, double>> qq;  // (theoretical, empirical) quantile
  std::vector<std::pair<double, double>> pp;  // (theoretical, empirical) CDF
};

/// QQ at plotting positions (i - 0.5)/n; PP pairs F(x_(i)) with i/n.
ProbabilityPlots qq_pp_data(std::span<const double> values, const DistributionFit& fit);

/// Log-likelihood / AIC / BIC table with one column per family.
void write_fit_report_csv(std::ostream& out, std::span<const DistributionFit> fits);
nlohmann::ordered_json fit_report_json(std::span<const DistributionFit> fits);

}  // namespace lfp
