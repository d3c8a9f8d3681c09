// SPDX-License-Identifier: Apache-2.0

#include "midi/metrics/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace midi::metrics {

Histogram1D::Histogram1D(std::vector<double> labels,
                         std::vector<double> masses)
    : labels_(std::move(labels)), masses_(std::move(masses)) {
  if (labels_.size() != masses_.size())
    throw std::invalid_argument("histogram labels/masses size mismatch");
  if (labels_.empty()) return;
  double total = 0.0;
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (!std::isfinite(labels_[i]))
      throw std::invalid_argument("histogram label must be finite");
    if (i > 0 && !(labels_[i] > labels_[i - 1]))
      throw std::invalid_argument("histogram labels must strictly increase");
    if (!(masses_[i] >= 0.0) || !std::isfinite(masses_[i]))
      throw std::invalid_argument("histogram mass must be finite and >= 0");
    total += masses_[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("histogram masses must sum to 1");
}

Histogram1D Histogram1D::from_counts(const std::map<double, double>& counts) {
  double total = 0.0;
  for (const auto& [label, count] : counts) {
    (void)label;
    if (!(count >= 0.0) || !std::isfinite(count))
      throw std::invalid_argument("histogram count must be finite and >= 0");
    total += count;
  }
  Histogram1D h;
  if (total <= 0.0) return h;  // no observations: the empty state
  for (const auto& [label, count] : counts) {
    if (count <= 0.0) continue;
    h.labels_.push_back(label);
    h.masses_.push_back(count / total);
  }
  return h;
}

Histogram1D Histogram1D::from_samples(std::span<const double> values,
                                      double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("bin width must be positive");
  std::map<double, double> counts;
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("histogram sample must be finite");
    double center =
        static_cast<double>(std::llround(v / bin_width)) * bin_width;
    counts[center] += 1.0;
  }
  return from_counts(counts);
}

double Histogram1D::mass_at(double label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return 0.0;
  return masses_[static_cast<size_t>(it - labels_.begin())];
}

namespace {

void require_nonempty(const Histogram1D& h, const char* what) {
  if (h.empty())
    throw std::invalid_argument(std::string(what) +
                                " is undefined for an empty histogram");
}

// Merged strictly-increasing union of both supports.
std::vector<double> merged_support(const Histogram1D& a,
                                   const Histogram1D& b) {
  std::vector<double> s;
  s.reserve(a.labels().size() + b.labels().size());
  std::merge(a.labels().begin(), a.labels().end(), b.labels().begin(),
             b.labels().end(), std::back_inserter(s));
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

double tv_distance(const Histogram1D& a, const Histogram1D& b) {
  require_nonempty(a, "total variation");
  require_nonempty(b, "total variation");
  double sum = 0.0;
  for (double x : merged_support(a, b))
    sum += std::abs(a.mass_at(x) - b.mass_at(x));
  return sum;
}

double w1_distance(const Histogram1D& a, const Histogram1D& b) {
  require_nonempty(a, "Wasserstein distance");
  require_nonempty(b, "Wasserstein distance");
  std::vector<double> support = merged_support(a, b);
  double dist = 0.0, cdf_a = 0.0, cdf_b = 0.0;
  for (size_t k = 0; k + 1 < support.size(); ++k) {
    cdf_a += a.mass_at(support[k]);
    cdf_b += b.mass_at(support[k]);
    dist += std::abs(cdf_a - cdf_b) * (support[k + 1] - support[k]);
  }
  return dist;
}

}  // namespace midi::metrics
