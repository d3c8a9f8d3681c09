// SPDX-License-Identifier: Apache-2.0

#include "midi/sampling/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "midi/noise/gaussian.hpp"

namespace midi::sampling {

namespace {

using moldata::OneHotGraph;
using numkit::Tensor;

int argmax_index(std::span<const double> v) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(v.size()); ++k)
    if (v[static_cast<size_t>(k)] > v[static_cast<size_t>(best)]) best = k;
  return best;
}

// Categorical state of one molecule mid-trajectory, kept as plain indices;
// the one-hot tensors handed to the predictor are rebuilt per step.
struct State {
  int n = 0;
  std::vector<int> x, c;   // per node
  std::vector<int> y;      // row-major n*n, symmetric, diagonal 0 ("none")
  std::vector<double> R;   // 3n, zero-CoM

  OneHotGraph to_graph(const moldata::Vocab& vocab) const {
    const int a = vocab.n_atom_types();
    const int ch = vocab.n_charge_types();
    const int b = moldata::kBondTypes;
    std::vector<double> X(static_cast<size_t>(n) * static_cast<size_t>(a), 0.0);
    std::vector<double> C(static_cast<size_t>(n) * static_cast<size_t>(ch),
                          0.0);
    std::vector<double> Y(static_cast<size_t>(n) * static_cast<size_t>(n) *
                              static_cast<size_t>(b),
                          0.0);
    for (int i = 0; i < n; ++i) {
      X[static_cast<size_t>(i * a + x[static_cast<size_t>(i)])] = 1.0;
      C[static_cast<size_t>(i * ch + c[static_cast<size_t>(i)])] = 1.0;
      for (int j = 0; j < n; ++j)
        Y[static_cast<size_t>((i * n + j) * b +
                              y[static_cast<size_t>(i * n + j)])] = 1.0;
    }
    OneHotGraph g;
    g.X = Tensor::from_data({n, a}, std::move(X));
    g.C = Tensor::from_data({n, ch}, std::move(C));
    g.Y = Tensor::from_data({n, n, b}, std::move(Y));
    g.R = Tensor::from_data({n, 3}, R);
    return g;
  }
};

std::vector<double> tensor_row(const Tensor& t, int row, int width) {
  auto d = t.data();
  std::vector<double> out(static_cast<size_t>(width));
  for (int k = 0; k < width; ++k)
    out[static_cast<size_t>(k)] = d[static_cast<size_t>(row * width + k)];
  return out;
}

// One reverse step for a single categorical entry. For t > 1 the next state
// is sampled from the marginalized reverse distribution; the final step
// (t = 1) commits to its argmax instead.
int reverse_category(const noise::MarginalTransition& tr,
                     const std::vector<double>& pred, int z_t,
                     const noise::ComponentSchedule& sch, int t,
                     numkit::Rng& rng) {
  std::vector<double> dist =
      tr.marginalized_reverse(pred, z_t, sch.alpha(t), sch.alpha_bar(t - 1));
  if (t == 1) return argmax_index(dist);
  return static_cast<int>(rng.categorical(dist));
}

}  // namespace

denoiser::DenoiserOutput DenoiserPredictor::predict(
    const moldata::OneHotGraph& g, int t) const {
  numkit::NoGradGuard ng;
  return model_->forward(g, t);
}

Sampler::Sampler(const Predictor& predictor,
                 const noise::NoiseSchedule& schedule,
                 const noise::TransitionSet& transitions,
                 const moldata::Vocab& vocab,
                 std::vector<double> node_count_probs)
    : predictor_(&predictor),
      schedule_(&schedule),
      transitions_(&transitions),
      vocab_(vocab),
      node_count_probs_(std::move(node_count_probs)) {
  if (schedule_->T < 1) throw std::invalid_argument("schedule has no steps");
  if (transitions_->x.dim() != vocab_.n_atom_types() ||
      transitions_->c.dim() != vocab_.n_charge_types() ||
      transitions_->y.dim() != moldata::kBondTypes)
    throw std::invalid_argument("transition dimensions do not match vocab");
  if (node_count_probs_.size() < 2)
    throw std::invalid_argument("node count distribution is empty");
  double total = 0.0;
  for (double p : node_count_probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("node count probability must be >= 0");
    total += p;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("node count distribution has no mass");
  if (node_count_probs_[0] != 0.0)
    throw std::invalid_argument("zero-atom molecules are not samplable");
}

moldata::Molecule Sampler::sample_one(numkit::Rng& rng) const {
  const int T = schedule_->T;
  State st;
  st.n = static_cast<int>(rng.categorical(node_count_probs_));
  const int n = st.n;

  // Prior draw: projected normal coordinates, stationary categoricals.
  st.R = noise::sample_projected_noise(n, rng);
  st.x.resize(static_cast<size_t>(n));
  st.c.resize(static_cast<size_t>(n));
  st.y.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    st.x[static_cast<size_t>(i)] =
        static_cast<int>(rng.categorical(transitions_->x.marginal()));
    st.c[static_cast<size_t>(i)] =
        static_cast<int>(rng.categorical(transitions_->c.marginal()));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int b = static_cast<int>(rng.categorical(transitions_->y.marginal()));
      st.y[static_cast<size_t>(i * n + j)] = b;
      st.y[static_cast<size_t>(j * n + i)] = b;
    }

  OneHotGraph g = st.to_graph(vocab_);
  if (state_probe) state_probe(T, g);

  for (int t = T; t >= 1; --t) {
    denoiser::DenoiserOutput out = predictor_->predict(g, t);

    // Coordinates: posterior sample around the clean-state prediction. At
    // t = 1 the coefficients collapse to (1, 0, 0), so this is R_hat itself.
    st.R = noise::gaussian_posterior_sample(out.R_hat.data(), st.R, n,
                                            schedule_->r, t, rng);
    noise::com_project(st.R, n);  // shed rounding drift before the next step

    const int a = vocab_.n_atom_types();
    const int ch = vocab_.n_charge_types();
    const int b = moldata::kBondTypes;
    for (int i = 0; i < n; ++i) {
      st.x[static_cast<size_t>(i)] =
          reverse_category(transitions_->x, tensor_row(out.pX, i, a),
                           st.x[static_cast<size_t>(i)], schedule_->x, t, rng);
      st.c[static_cast<size_t>(i)] =
          reverse_category(transitions_->c, tensor_row(out.pC, i, ch),
                           st.c[static_cast<size_t>(i)], schedule_->c, t, rng);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int next = reverse_category(
            transitions_->y, tensor_row(out.pY, i * n + j, b),
            st.y[static_cast<size_t>(i * n + j)], schedule_->y, t, rng);
        st.y[static_cast<size_t>(i * n + j)] = next;
        st.y[static_cast<size_t>(j * n + i)] = next;
      }

    g = st.to_graph(vocab_);
    if (state_probe) state_probe(t - 1, g);
  }

  moldata::Molecule mol(n);
  for (int i = 0; i < n; ++i) {
    mol.set_atom(i, st.x[static_cast<size_t>(i)]);
    mol.set_charge(
        i, vocab_.charge_values[static_cast<size_t>(st.c[static_cast<size_t>(
               i)])]);
    mol.set_coord(i, {st.R[static_cast<size_t>(3 * i)],
                      st.R[static_cast<size_t>(3 * i + 1)],
                      st.R[static_cast<size_t>(3 * i + 2)]});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      mol.set_bond(i, j,
                   static_cast<moldata::Bond>(
                       st.y[static_cast<size_t>(i * n + j)]));
  return mol;
}

std::vector<moldata::Molecule> Sampler::sample(int count,
                                               uint64_t seed) const {
  if (count < 0) throw std::invalid_argument("sample count must be >= 0");
  std::vector<moldata::Molecule> out;
  out.reserve(static_cast<size_t>(count));
  constexpr uint64_t kSampleStream = 0x6d6f6c65;  // per-molecule RNG lane
  for (int i = 0; i < count; ++i) {
    numkit::Rng rng(
        numkit::derive_seed(seed, kSampleStream, static_cast<uint64_t>(i)));
    out.push_back(sample_one(rng));
  }
  return out;
}

}  // namespace midi::sampling
