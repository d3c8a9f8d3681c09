// SPDX-License-Identifier: Apache-2.0
//
// Seeded random source. All distributions are hand-rolled on top of
// mt19937_64 so that draws are reproducible across standard libraries
// (std::normal_distribution and friends are implementation-defined).

#ifndef MIDI_NUMKIT_RNG_HPP
#define MIDI_NUMKIT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace midi::numkit {

// splitmix64 finalizer; good avalanche, used to derive child seeds.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent child seed for (root, stream, index), e.g. one RNG per
// sampled molecule so parallel generation stays deterministic.
inline uint64_t derive_seed(uint64_t root, uint64_t stream, uint64_t index = 0) {
  return mix64(mix64(root ^ mix64(stream)) ^ mix64(~index));
}

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t raw() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Multiply-shift keeps the draw deterministic;
  // the bias is 2^-64-scale, irrelevant at our n.
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int(0)");
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Standard normal via Box-Muller; the spare from each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill_normal(std::span<double> out) {
    for (double& v : out) v = normal();
  }

  // Index draw from an unnormalized nonnegative weight vector.
  size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0 || !std::isfinite(w))
        throw std::invalid_argument("categorical weight must be finite and >= 0");
      total += w;
    }
    if (total <= 0.0)
      throw std::invalid_argument("categorical weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;  // rounding fell past the last edge
  }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[uniform_int(i)]);
  }

  Rng child(uint64_t stream, uint64_t index = 0) {
    return Rng(derive_seed(state_hash(), stream, index));
  }

  // Engine state as text (mt19937_64's stream format), for checkpoints.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_ << ' ' << (have_spare_ ? 1 : 0) << ' ';
    os.precision(17);
    os << spare_;
    return os.str();
  }

  void load_state(const std::string& s) {
    std::istringstream is(s);
    int spare_flag = 0;
    is >> engine_ >> spare_flag >> spare_;
    if (is.fail()) throw std::runtime_error("malformed RNG state string");
    have_spare_ = spare_flag != 0;
  }

 private:
  // Cheap digest of the current position, only used to label child streams.
  uint64_t state_hash() {
    return mix64(engine_());
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace midi::numkit

#endif
