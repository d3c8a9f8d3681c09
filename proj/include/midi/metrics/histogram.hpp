// SPDX-License-Identifier: Apache-2.0
//
// Finitely supported distributions over real-valued labels, plus the two
// distances used by the evaluation metrics: plain l1 (total variation
// without the 1/2) and 1D Wasserstein via CDF integration.

#ifndef MIDI_METRICS_HISTOGRAM_HPP
#define MIDI_METRICS_HISTOGRAM_HPP

#include <map>
#include <span>
#include <vector>

namespace midi::metrics {

// Probability masses on strictly increasing labels. The default-constructed
// histogram is the explicit "no data" state: it carries no mass and the
// distance functions reject it rather than treating it as a distribution.
class Histogram1D {
 public:
  Histogram1D() = default;
  Histogram1D(std::vector<double> labels, std::vector<double> masses);

  // Normalizes nonnegative counts; an all-empty map gives the empty state.
  static Histogram1D from_counts(const std::map<double, double>& counts);

  // Rounds each value to the nearest bin center k * bin_width; labels are
  // the centers themselves, so delta-like inputs keep their location.
  static Histogram1D from_samples(std::span<const double> values,
                                  double bin_width);

  bool empty() const { return labels_.empty(); }
  const std::vector<double>& labels() const { return labels_; }
  const std::vector<double>& masses() const { return masses_; }
  double mass_at(double label) const;  // 0 when the label is absent

 private:
  std::vector<double> labels_, masses_;
};

// sum_x |p(x) - q(x)| over the union of supports. Errors on empty input.
double tv_distance(const Histogram1D& a, const Histogram1D& b);

// integral of |CDF_a - CDF_b| over the merged support. Errors on empty
// input. Units are the label units.
double w1_distance(const Histogram1D& a, const Histogram1D& b);

}  // namespace midi::metrics

#endif
