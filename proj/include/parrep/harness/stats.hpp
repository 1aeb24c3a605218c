#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "parrep/process/rng.hpp"

namespace parrep::stats {

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;     // sample standard deviation (n - 1)
  double sem = 0.0;  // std / sqrt(n)
  std::size_t n = 0;
};

Summary summarize(std::span<const double> xs);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// Pearson goodness of fit. Bins with expected count below `min_expected`
/// are merged into their right neighbour (the last into its left).
/// `fitted` parameters reduce the degrees of freedom.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_prob,
                          int fitted = 0, double min_expected = 5.0);

/// Pearson test that two count vectors over the same bins share one law.
/// Bins with combined count below `min_count` are merged.
TestResult chi_square_homogeneity(std::span<const double> a, std::span<const double> b,
                                  double min_count = 10.0);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

/// One-sample Kolmogorov-Smirnov test against a continuous cdf.
TestResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Chi-square fit of positive integer samples to Geometric(p) on {1, 2, ...}
/// with bins 1..max_bin and a pooled tail. If p <= 0 it is estimated as 1/mean.
TestResult geometric_fit(std::span<const std::uint64_t> xs, double p = 0.0, int max_bin = 30);

/// Chi-square fit of positive reals to Exponential(rate) on equiprobable
/// bins. If rate <= 0 it is estimated as 1/mean.
TestResult exponential_fit(std::span<const double> xs, double rate = 0.0, int bins = 20);

/// Plug-in mutual information (nats) of two label sequences.
double mutual_information(std::span<const int> x, std::span<const int> y);

struct PermutationResult {
  double observed = 0.0;
  double threshold = 0.0;  // null quantile
  bool within_null = true;
};

/// Compares the mutual information of (x, y) with its distribution under
/// random relabelling of y.
PermutationResult mi_permutation_test(std::span<const int> x, std::span<const int> y,
                                      int permutations, double quantile, RngStream stream);

/// Pearson correlation coefficient.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace parrep::stats
