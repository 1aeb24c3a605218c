#include "parrep/harness/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "parrep/errors.hpp"

namespace parrep::stats {

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.sem = s.std / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("chi_square_sf: degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

namespace {

// Merges adjacent bins until every bin reaches `floor` in `weight`.
std::vector<std::vector<std::size_t>> merge_bins(std::span<const double> weight, double floor) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> cur;
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    cur.push_back(i);
    acc += weight[i];
    if (acc >= floor) {
      groups.push_back(std::move(cur));
      cur.clear();
      acc = 0.0;
    }
  }
  if (!cur.empty()) {
    if (groups.empty()) {
      groups.push_back(std::move(cur));
    } else {
      groups.back().insert(groups.back().end(), cur.begin(), cur.end());
    }
  }
  return groups;
}

}  // namespace

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_prob,
                          int fitted, double min_expected) {
  if (observed.size() != expected_prob.size() || observed.empty()) {
    throw InvalidArgument("chi_square_gof: bin counts and probabilities must match");
  }
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double total_p = std::accumulate(expected_prob.begin(), expected_prob.end(), 0.0);
  if (!(n > 0.0) || !(total_p > 0.0)) throw InvalidArgument("chi_square_gof: empty sample");
  std::vector<double> expected(observed.size());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = n * expected_prob[i] / total_p;
  const auto groups = merge_bins(expected, min_expected);
  double stat = 0.0;
  for (const auto& g : groups) {
    double o = 0.0, e = 0.0;
    for (std::size_t i : g) {
      o += observed[i];
      e += expected[i];
    }
    if (e > 0.0) {
      stat += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      return {std::numeric_limits<double>::infinity(), 1.0, 0.0};
    }
  }
  const double dof = static_cast<double>(groups.size()) - 1.0 - fitted;
  if (dof < 1.0) return {stat, dof, 1.0};
  return {stat, dof, chi_square_sf(stat, dof)};
}

TestResult chi_square_homogeneity(std::span<const double> a, std::span<const double> b,
                                  double min_count) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidArgument("chi_square_homogeneity: bin counts must match");
  }
  std::vector<double> both(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) both[i] = a[i] + b[i];
  const auto groups = merge_bins(both, min_count);
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("chi_square_homogeneity: empty sample");
  const double n = na + nb;
  double stat = 0.0;
  for (const auto& g : groups) {
    double oa = 0.0, ob = 0.0;
    for (std::size_t i : g) {
      oa += a[i];
      ob += b[i];
    }
    const double col = oa + ob;
    if (col <= 0.0) continue;
    const double ea = na * col / n;
    const double eb = nb * col / n;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const double dof = static_cast<double>(groups.size()) - 1.0;
  if (dof < 1.0) return {stat, dof, 1.0};
  return {stat, dof, chi_square_sf(stat, dof)};
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  // Alternating series 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw InvalidArgument("ks_test: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  // Stephens' small-sample correction.
  return {d, n, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, na + nb, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult geometric_fit(std::span<const std::uint64_t> xs, double p, int max_bin) {
  if (xs.empty()) throw InvalidArgument("geometric_fit: empty sample");
  int fitted = 0;
  if (!(p > 0.0)) {
    double mean = 0.0;
    for (auto x : xs) mean += static_cast<double>(x);
    mean /= static_cast<double>(xs.size());
    p = 1.0 / mean;
    fitted = 1;
  }
  const auto bins = static_cast<std::size_t>(max_bin);
  std::vector<double> obs(bins + 1, 0.0), prob(bins + 1, 0.0);
  for (auto x : xs) {
    if (x == 0) throw InvalidArgument("geometric_fit: samples must be positive");
    obs[std::min<std::size_t>(x, bins + 1) - 1] += 1.0;
  }
  double tail = 1.0;
  for (std::size_t k = 0; k < bins; ++k) {
    prob[k] = tail * p;
    tail *= 1.0 - p;
  }
  prob[bins] = tail;
  return chi_square_gof(obs, prob, fitted);
}

TestResult exponential_fit(std::span<const double> xs, double rate, int bins) {
  if (xs.empty()) throw InvalidArgument("exponential_fit: empty sample");
  int fitted = 0;
  if (!(rate > 0.0)) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    rate = 1.0 / mean;
    fitted = 1;
  }
  const auto nb = static_cast<std::size_t>(bins);
  std::vector<double> obs(nb, 0.0), prob(nb, 1.0 / static_cast<double>(nb));
  for (double x : xs) {
    const double u = 1.0 - std::exp(-rate * x);
    obs[std::min(nb - 1, static_cast<std::size_t>(u * static_cast<double>(nb)))] += 1.0;
  }
  return chi_square_gof(obs, prob, fitted);
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size() || x.empty()) {
    throw InvalidArgument("mutual_information: sequences must have equal nonzero length");
  }
  std::map<int, double> px, py;
  std::map<std::pair<int, int>, double> pxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[x[i]] += 1.0;
    py[y[i]] += 1.0;
    pxy[{x[i], y[i]}] += 1.0;
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [key, c] : pxy) {
    mi += (c / n) * std::log(c * n / (px[key.first] * py[key.second]));
  }
  return std::max(mi, 0.0);
}

PermutationResult mi_permutation_test(std::span<const int> x, std::span<const int> y,
                                      int permutations, double quantile, RngStream stream) {
  if (permutations < 1) throw InvalidArgument("mi_permutation_test: need permutations");
  PermutationResult r;
  r.observed = mutual_information(x, y);
  std::vector<int> shuffled(y.begin(), y.end());
  std::vector<double> null;
  null.reserve(static_cast<std::size_t>(permutations));
  for (int i = 0; i < permutations; ++i) {
    Rng rng = stream.at(static_cast<std::uint64_t>(i));
    for (std::size_t j = shuffled.size(); j > 1; --j) {
      std::swap(shuffled[j - 1], shuffled[rng.below(j)]);
    }
    null.push_back(mutual_information(x, shuffled));
  }
  std::sort(null.begin(), null.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(null.size()))) - 1;
  r.threshold = null[std::min(idx, null.size() - 1)];
  r.within_null = r.observed <= r.threshold;
  return r;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidArgument("correlation: need two equal sequences of length >= 2");
  }
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - sa.mean) * (b[i] - sb.mean);
  c /= static_cast<double>(a.size() - 1);
  return (sa.std > 0.0 && sb.std > 0.0) ? c / (sa.std * sb.std) : 0.0;
}

}  // namespace parrep::stats
