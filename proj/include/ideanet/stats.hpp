#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ideanet::stats {

/// x_i / sum(x). Throws DomainError on an all-zero input.
std::vector<double> relative_shares(const std::vector<double>& x);

struct OlsTerm {
  std::string name;
  double beta = 0.0;  // coefficient on z-scored predictor, z-scored response
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
};

struct RegressionResult {
  std::vector<OlsTerm> terms;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  int df = 0;  // n - p - 1
};

/// OLS with intercept on z-scored response and predictors. Reported betas
/// are standardized coefficients; p-values are two-tailed t with n-p-1 df.
RegressionResult ols_standardized(
    const std::vector<double>& y,
    const std::vector<std::pair<std::string, std::vector<double>>>& predictors);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // 95% CI for the mean difference / slope
  double mean_a = 0.0, mean_b = 0.0;
};

/// Two-sample t, pooled-variance Student form by default (df = na+nb-2);
/// Welch behind the flag.
TestResult pooled_ttest(const std::vector<double>& a, const std::vector<double>& b,
                        bool welch = false);

/// min(1, p * comparisons).
double bonferroni(double p, int comparisons);

struct CorrelationResult {
  double pearson = 0.0, pearson_p = 1.0;
  double spearman = 0.0, spearman_p = 1.0;
};

CorrelationResult correlations(const std::vector<double>& x,
                               const std::vector<double>& y);

/// OLS slope with a two-tailed t-test against slope = 0.
TestResult trend_slope_test(const std::vector<std::pair<double, double>>& series);

/// ICC(3,k), two-way mixed, consistency form, averaged raters.
/// nullopt when the between-target variance is zero.
std::optional<double> icc_3k(const std::vector<std::vector<double>>& ratings);

/// Krippendorff's alpha with the interval difference metric.
/// units[u][c] is coder c's value for unit u; nullopt marks a missing cell.
/// Returns nullopt when no unit has two pairable values.
std::optional<double> krippendorff_alpha_interval(
    const std::vector<std::vector<std::optional<double>>>& units);

// t-distribution machinery (regularized incomplete beta, continued fraction).
double incomplete_beta(double a, double b, double x);
double t_cdf(double t, double df);
double t_two_tailed_p(double t, double df);
double t_quantile(double p, double df);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace ideanet::stats
