#include "ideanet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ideanet/errors.hpp"

namespace ideanet::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Continued fraction for the regularized incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

std::vector<double> zscore(const std::vector<double>& v, const std::string& name) {
  double m = mean(v);
  double var = sample_variance(v);
  if (var <= 0.0)
    throw DomainError("zero-variance column: " + name);
  double sd = std::sqrt(var);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / sd;
  return out;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double r = 0.5 * (i + j) + 1.0;  // average rank, 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw DomainError("undefined correlation: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double correlation_p(double r, std::size_t n) {
  if (std::fabs(r) >= 1.0) return 0.0;
  double t = r * std::sqrt((double(n) - 2.0) / (1.0 - r * r));
  return t_two_tailed_p(t, double(n) - 2.0);
}

}  // namespace

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / (double(v.size()) - 1.0);
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  double x = df / (df + t * t);
  double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double t_two_tailed_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  double x = df / (df + t * t);
  return std::min(1.0, incomplete_beta(df / 2.0, 0.5, x));
}

double t_quantile(double p, double df) {
  if (p <= 0.0 || p >= 1.0) throw DomainError("t quantile requires p in (0,1)");
  double lo = -1.0, hi = 1.0;
  while (t_cdf(lo, df) > p) lo *= 2.0;
  while (t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (t_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> relative_shares(const std::vector<double>& x) {
  double sum = 0.0;
  for (double v : x) {
    if (v < 0.0) throw DomainError("relative shares require non-negative values");
    sum += v;
  }
  if (sum <= 0.0) throw DomainError("relative shares of an all-zero vector");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / sum;
  return out;
}

RegressionResult ols_standardized(
    const std::vector<double>& y,
    const std::vector<std::pair<std::string, std::vector<double>>>& predictors) {
  const std::size_t n = y.size();
  const std::size_t p = predictors.size();
  if (p == 0) throw DomainError("regression needs at least one predictor");
  if (n < p + 2) throw DomainError("regression needs at least p+2 observations");
  for (const auto& [name, col] : predictors)
    if (col.size() != n)
      throw DomainError("predictor length mismatch: " + name);

  std::vector<double> yz = zscore(y, "response");
  std::vector<std::vector<double>> design(n, std::vector<double>(p + 1, 1.0));
  for (std::size_t j = 0; j < p; ++j) {
    auto col = zscore(predictors[j].second, predictors[j].first);
    for (std::size_t i = 0; i < n; ++i) design[i][j + 1] = col[i];
  }

  // Normal equations with explicit (X'X)^-1 via Gauss-Jordan.
  const std::size_t d = p + 1;
  std::vector<std::vector<double>> xtx(d, std::vector<double>(d, 0.0));
  std::vector<double> xty(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      xty[a] += design[i][a] * yz[i];
      for (std::size_t b = 0; b < d; ++b) xtx[a][b] += design[i][a] * design[i][b];
    }
  }
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a) inv[a][a] = 1.0;
  auto work = xtx;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(work[r][col]) > std::fabs(work[pivot][col])) pivot = r;
    if (std::fabs(work[pivot][col]) < 1e-10 * double(n)) {
      std::string name = col == 0 ? "intercept" : predictors[col - 1].first;
      throw DomainError("singular design: collinear column " + name);
    }
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    double scale = work[col][col];
    for (std::size_t c = 0; c < d; ++c) {
      work[col][c] /= scale;
      inv[col][c] /= scale;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      double f = work[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) {
        work[r][c] -= f * work[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  std::vector<double> beta(d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) beta[a] += inv[a][b] * xty[b];

  double rss = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t a = 0; a < d; ++a) fit += design[i][a] * beta[a];
    rss += (yz[i] - fit) * (yz[i] - fit);
    tss += yz[i] * yz[i];  // z-scored response is centered
  }
  const int df = int(n) - int(p) - 1;
  double sigma2 = rss / df;

  RegressionResult result;
  result.df = df;
  result.r2 = 1.0 - rss / tss;
  result.adj_r2 =
      1.0 - (1.0 - result.r2) * (double(n) - 1.0) / (double(n) - double(p) - 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    OlsTerm term;
    term.name = predictors[j].first;
    term.beta = beta[j + 1];
    term.se = std::sqrt(sigma2 * inv[j + 1][j + 1]);
    term.t = term.se > 0.0 ? term.beta / term.se : (term.beta == 0.0 ? 0.0 : kInf);
    term.p = t_two_tailed_p(term.t, double(df));
    result.terms.push_back(term);
  }
  return result;
}

TestResult pooled_ttest(const std::vector<double>& a, const std::vector<double>& b,
                        bool welch) {
  const std::size_t na = a.size(), nb = b.size();
  if (na < 2 || nb < 2) throw DomainError("t-test needs at least 2 values per sample");
  TestResult r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  double va = sample_variance(a), vb = sample_variance(b);
  double diff = r.mean_a - r.mean_b;
  double se;
  if (welch) {
    se = std::sqrt(va / na + vb / nb);
    double num = (va / na + vb / nb) * (va / na + vb / nb);
    double den = (va / na) * (va / na) / (na - 1.0) +
                 (vb / nb) * (vb / nb) / (nb - 1.0);
    r.df = den > 0.0 ? num / den : double(na + nb - 2);
  } else {
    double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
    r.df = double(na + nb - 2);
  }
  if (se == 0.0) {
    if (diff == 0.0) {
      r.statistic = 0.0;
      r.p_two_tailed = 1.0;
      r.ci_lo = r.ci_hi = 0.0;
    } else {
      r.statistic = diff > 0 ? kInf : -kInf;
      r.p_two_tailed = 0.0;
      r.ci_lo = r.ci_hi = diff;
    }
    return r;
  }
  r.statistic = diff / se;
  r.p_two_tailed = t_two_tailed_p(r.statistic, r.df);
  double half = t_quantile(0.975, r.df) * se;
  r.ci_lo = diff - half;
  r.ci_hi = diff + half;
  return r;
}

double bonferroni(double p, int comparisons) {
  if (comparisons < 1) throw DomainError("comparisons must be >= 1");
  return std::min(1.0, p * comparisons);
}

CorrelationResult correlations(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("correlation length mismatch");
  if (x.size() < 3) throw DomainError("correlation needs at least 3 points");
  CorrelationResult r;
  r.pearson = pearson_r(x, y);
  r.pearson_p = correlation_p(r.pearson, x.size());
  r.spearman = pearson_r(average_ranks(x), average_ranks(y));
  r.spearman_p = correlation_p(r.spearman, x.size());
  return r;
}

TestResult trend_slope_test(const std::vector<std::pair<double, double>>& series) {
  const std::size_t n = series.size();
  if (n < 3) throw DomainError("trend test needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : series) {
    mx += x;
    my += y;
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : series) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) throw DomainError("degenerate trend: all x values equal");
  double slope = sxy / sxx;
  double rss = 0.0;
  for (const auto& [x, y] : series) {
    double fit = my + slope * (x - mx);
    rss += (y - fit) * (y - fit);
  }
  TestResult r;
  r.df = double(n) - 2.0;
  r.mean_a = slope;
  r.mean_b = my - slope * mx;  // intercept
  double se = std::sqrt(rss / r.df / sxx);
  if (se == 0.0) {
    r.statistic = slope == 0.0 ? 0.0 : (slope > 0 ? kInf : -kInf);
    r.p_two_tailed = slope == 0.0 ? 1.0 : 0.0;
    r.ci_lo = r.ci_hi = slope;
    return r;
  }
  r.statistic = slope / se;
  r.p_two_tailed = t_two_tailed_p(r.statistic, r.df);
  double half = t_quantile(0.975, r.df) * se;
  r.ci_lo = slope - half;
  r.ci_hi = slope + half;
  return r;
}

std::optional<double> icc_3k(const std::vector<std::vector<double>>& ratings) {
  const std::size_t n = ratings.size();
  if (n < 2) throw DomainError("ICC needs at least 2 targets");
  const std::size_t k = ratings[0].size();
  if (k < 2) throw DomainError("ICC needs at least 2 raters");
  for (const auto& row : ratings)
    if (row.size() != k) throw DomainError("ICC matrix must be complete");

  double grand = 0.0;
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      grand += ratings[i][j];
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
    }
  grand /= double(n * k);
  for (auto& v : row_mean) v /= double(k);
  for (auto& v : col_mean) v /= double(n);

  double ss_rows = 0.0, ss_cols = 0.0, ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
  ss_rows *= double(k);
  for (std::size_t j = 0; j < k; ++j) ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  ss_cols *= double(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      ss_total += (ratings[i][j] - grand) * (ratings[i][j] - grand);
  double ss_err = ss_total - ss_rows - ss_cols;

  double bms = ss_rows / (double(n) - 1.0);
  double ems = ss_err / ((double(n) - 1.0) * (double(k) - 1.0));
  if (bms <= 0.0) return std::nullopt;
  return (bms - ems) / bms;
}

std::optional<double> krippendorff_alpha_interval(
    const std::vector<std::vector<std::optional<double>>>& units) {
  // Pairable values: those in units rated by >= 2 coders.
  std::vector<std::vector<double>> pairable_units;
  std::vector<double> all_values;
  for (const auto& unit : units) {
    std::vector<double> vals;
    for (const auto& v : unit)
      if (v) vals.push_back(*v);
    if (vals.size() >= 2) {
      pairable_units.push_back(vals);
      all_values.insert(all_values.end(), vals.begin(), vals.end());
    }
  }
  const double n = double(all_values.size());
  if (n < 2.0) return std::nullopt;

  double d_obs = 0.0;
  for (const auto& vals : pairable_units) {
    double unit_sum = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      for (std::size_t j = 0; j < vals.size(); ++j)
        if (i != j) unit_sum += (vals[i] - vals[j]) * (vals[i] - vals[j]);
    d_obs += unit_sum / (double(vals.size()) - 1.0);
  }
  d_obs /= n;

  double d_exp = 0.0;
  for (std::size_t i = 0; i < all_values.size(); ++i)
    for (std::size_t j = 0; j < all_values.size(); ++j)
      if (i != j) d_exp += (all_values[i] - all_values[j]) * (all_values[i] - all_values[j]);
  d_exp /= n * (n - 1.0);

  if (d_exp == 0.0) return 1.0;  // everyone agrees everywhere
  return 1.0 - d_obs / d_exp;
}

}  // namespace ideanet::stats
