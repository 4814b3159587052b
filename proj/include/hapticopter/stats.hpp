#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "hapticopter/special_functions.hpp"

namespace hapticopter {

struct RankTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof1 = 0.0;
  double dof2 = 0.0;        // 0 for single-dof tests (chi-square)
  bool degenerate = false;  // no variability to test; statistic and p are conventions
};

using Groups = std::vector<std::vector<double>>;

namespace detail {

inline void require_finite_groups(const Groups& groups) {
  for (const auto& g : groups)
    for (double v : g)
      if (!std::isfinite(v)) throw DomainError("observations must be finite");
}

// Average ranks (1-based) with ties sharing the mean of their positions.
// Also returns sum over tie blocks of (t^3 - t).
inline std::vector<double> mid_ranks(std::span<const double> values, double& tie_term) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  return ranks;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// Kruskal-Wallis H test with mid-ranks and the tie-correction divisor;
// p-value from the chi-square tail with k - 1 degrees of freedom.
inline RankTestResult kruskal_wallis(const Groups& groups) {
  if (groups.size() < 2) throw DomainError("kruskal_wallis needs at least two groups");
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw DomainError("kruskal_wallis: every group must be nonempty");
    total += g.size();
  }
  if (total < 3) throw DomainError("kruskal_wallis needs at least three observations");
  detail::require_finite_groups(groups);

  std::vector<double> pooled;
  pooled.reserve(total);
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  double tie_term = 0.0;
  const auto ranks = detail::mid_ranks(pooled, tie_term);

  const double n = static_cast<double>(total);
  RankTestResult r;
  r.dof1 = static_cast<double>(groups.size() - 1);
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction <= 0.0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.degenerate = true;
    return r;
  }

  // H = 12/(N(N+1)) * sum_j n_j (mean rank_j - (N+1)/2)^2, the
  // cancellation-free form of 12/(N(N+1)) sum R_j^2/n_j - 3(N+1).
  const double grand = 0.5 * (n + 1.0);
  double between = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    offset += g.size();
    const double nj = static_cast<double>(g.size());
    const double dev = rank_sum / nj - grand;
    between += nj * dev * dev;
  }
  const double h = (12.0 * between) / (n * (n + 1.0)) / correction;
  r.statistic = std::max(h, 0.0);
  r.p_value = special::chi_square_sf(r.statistic, r.dof1);
  return r;
}

enum class LeveneCenter { Mean, Median };

constexpr std::string_view to_string(LeveneCenter c) {
  return c == LeveneCenter::Mean ? "mean" : "median";
}

// Levene's test on absolute deviations from each group's centre (mean:
// classic Levene; median: Brown-Forsythe). p-value from F(k-1, N-k).
inline RankTestResult levene(const Groups& groups, LeveneCenter center = LeveneCenter::Mean) {
  if (groups.size() < 2) throw DomainError("levene needs at least two groups");
  for (const auto& g : groups)
    if (g.size() < 2) throw DomainError("levene: every group needs at least two observations");
  detail::require_finite_groups(groups);

  const std::size_t k = groups.size();
  std::vector<std::vector<double>> dev(k);
  std::vector<double> dev_mean(k);
  double n_total = 0.0;
  double dev_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& g = groups[j];
    const double c = center == LeveneCenter::Mean ? detail::mean(g) : detail::median(g);
    dev[j].reserve(g.size());
    for (double x : g) dev[j].push_back(std::fabs(x - c));
    dev_mean[j] = detail::mean(dev[j]);
    n_total += static_cast<double>(g.size());
    for (double z : dev[j]) dev_sum += z;
  }
  const double grand = dev_sum / n_total;
  double between = 0.0;
  double within = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double d = dev_mean[j] - grand;
    between += static_cast<double>(dev[j].size()) * d * d;
    for (double z : dev[j]) within += (z - dev_mean[j]) * (z - dev_mean[j]);
  }

  RankTestResult r;
  r.dof1 = static_cast<double>(k - 1);
  r.dof2 = n_total - static_cast<double>(k);
  if (within == 0.0) {
    r.degenerate = true;
    r.statistic = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.p_value = between > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.statistic = (r.dof2 / r.dof1) * (between / within);
  r.p_value = special::f_sf(r.statistic, r.dof1, r.dof2);
  return r;
}

}  // namespace hapticopter
