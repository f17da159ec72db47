#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

// Shared statistics helpers for the test suites.
namespace testutil {

// Pearson goodness-of-fit statistic against a uniform distribution over
// `bins` categories.
inline double chi_square_uniform(std::span<const std::uint64_t> counts) {
  double total = 0;
  for (auto c : counts) total += double(c);
  const double expect = total / double(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double d = double(c) - expect;
    stat += d * d / expect;
  }
  return stat;
}

// Two-sample homogeneity statistic over a 2 x bins table.
inline double chi_square_two_sample(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b) {
  double na = 0, nb = 0;
  for (auto c : a) na += double(c);
  for (auto c : b) nb += double(c);
  const double n = na + nb;
  double stat = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double pooled = double(a[i]) + double(b[i]);
    if (pooled == 0) continue;
    const double ea = pooled * na / n;
    const double eb = pooled * nb / n;
    const double da = double(a[i]) - ea;
    const double db = double(b[i]) - eb;
    stat += da * da / ea + db * db / eb;
  }
  return stat;
}

// Upper critical value of the chi-square distribution via the
// Wilson-Hilferty cube approximation; z is the standard normal quantile
// (2.3263478740 for alpha = 0.01).
inline double chi_square_crit(int df, double z = 2.3263478740) {
  const double t = 2.0 / (9.0 * df);
  const double w = 1.0 - t + z * std::sqrt(t);
  return df * w * w * w;
}

// Histogram of the low 8 bits of each sample: the mod-2^8 projection of the
// ring, where uniformity is testable with reasonable sample counts.
inline std::vector<std::uint64_t> low_byte_hist(
    std::span<const std::uint64_t> samples) {
  std::vector<std::uint64_t> h(256, 0);
  for (auto s : samples) ++h[std::size_t(s & 0xff)];
  return h;
}

} // namespace testutil
