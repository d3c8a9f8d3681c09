// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "geom_fixtures.hpp"
#include "midi/denoiser/model.hpp"
#include "midi/denoiser/modules.hpp"
#include "midi/numkit/grad_check.hpp"
#include "midi/numkit/ops.hpp"
#include "midi/numkit/rng.hpp"
#include "mol_fixtures.hpp"

using namespace midi;
using namespace midi::numkit;
using namespace midi::denoiser;
using moldata::OneHotGraph;
using moldata::Vocab;

namespace {

DenoiserConfig tiny_config() {
  DenoiserConfig cfg;
  cfg.n_layers = 2;
  cfg.node_dim = 16;
  cfg.edge_dim = 8;
  cfg.global_dim = 16;
  cfg.n_heads = 2;
  cfg.t_emb_dim = 8;
  cfg.pos_hidden = 4;
  cfg.max_timestep = 100;
  return cfg;
}

Denoiser tiny_model(uint64_t seed = 7) {
  Vocab v;
  return Denoiser(tiny_config(), v.n_atom_types(), v.n_charge_types(),
                  moldata::kBondTypes, seed);
}

// Fills every parameter (including the zero-initialized output layers) with
// small random values so coordinate updates and modulations actually move.
void randomize_params(Denoiser& model, uint64_t seed, double scale = 0.3) {
  Rng rng(seed);
  for (auto& [name, t] : model.params().entries()) {
    Tensor tt = t;
    for (double& x : tt.mutable_data()) x = rng.uniform(-scale, scale);
  }
}

OneHotGraph rotated_graph(const OneHotGraph& g, const testfix::Rotation& rot) {
  OneHotGraph out = g;
  auto coords = testfix::rotate_coords(g.R.data(), rot);
  out.R = Tensor::from_data(g.R.shape(), std::move(coords));
  return out;
}

double com_norm(const Tensor& R) {
  const int n = static_cast<int>(R.dim(0));
  double c[3] = {0, 0, 0};
  auto d = R.data();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) c[k] += d[static_cast<size_t>(3 * i + k)];
  return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) / n;
}

}  // namespace

TEST_CASE("pair descriptors match hand-computed values") {
  // Two points: r_0 = (1,0,0), r_1 = (0,1,0).
  Tensor R = Tensor::from_data({2, 3}, {1, 0, 0, 0, 1, 0});
  Tensor d = pair_descriptors(R, 1e-6);
  REQUIRE(d.shape() == Shape{4, 4});
  auto v = d.data();
  // Pair (0,1) is row 1: distance sqrt(2), norms 1 and 1, cosine 0.
  CHECK(v[4] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(v[5] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(v[6] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(v[7]) < 1e-9);
  // Diagonal pair (0,0): distance ~0, cosine ~1.
  CHECK(std::abs(v[0]) < 1e-5);
  CHECK(v[3] == doctest::Approx(1.0).epsilon(1e-5));

  // Coincident nonzero points: distance ~0, cosine ~1, sane gradients.
  Tensor Rc = Tensor::from_data({2, 3}, {0.5, -0.25, 1, 0.5, -0.25, 1}, true);
  Tensor dc = pair_descriptors(Rc, 1e-6);
  CHECK(std::abs(dc.data()[4]) < 1e-5);
  CHECK(dc.data()[7] == doctest::Approx(1.0).epsilon(1e-5));
  backward(sum(dc));
  for (double gv : Rc.grad()) CHECK(std::isfinite(gv));
}

TEST_CASE("pair descriptors are rotation invariant") {
  Rng rng(11);
  Tensor R = Tensor::from_data(
      {5, 3}, [&] {
        std::vector<double> v(15);
        rng.fill_normal(v);
        return v;
      }());
  Tensor base = pair_descriptors(R, 1e-6);
  for (int trial = 0; trial < 10; ++trial) {
    auto rot = testfix::random_rotation(rng);
    Tensor Rrot = Tensor::from_data({5, 3}, testfix::rotate_coords(R.data(), rot));
    Tensor d = pair_descriptors(Rrot, 1e-6);
    CHECK(testfix::max_abs_diff(base.data(), d.data()) < 1e-10);
  }
}

TEST_CASE("e3norm rescales by the root-mean-square norm") {
  // Rows (3,0,0) and (0,4,0): mean squared norm (9+16)/2 = 12.5.
  Tensor R = Tensor::from_data({2, 3}, {3, 0, 0, 0, 4, 0});
  const double rms = std::sqrt(12.5);
  Tensor gamma = Tensor::from_data({1}, {1.0});
  Tensor out = e3norm(R, gamma, 1e-6);
  CHECK(out.data()[0] == doctest::Approx(3.0 / (rms + 1e-6)).epsilon(1e-12));
  CHECK(out.data()[4] == doctest::Approx(4.0 / (rms + 1e-6)).epsilon(1e-12));

  Tensor gamma2 = Tensor::from_data({1}, {2.0});
  Tensor out2 = e3norm(R, gamma2, 1e-6);
  CHECK(out2.data()[0] == doctest::Approx(2.0 * 3.0 / (rms + 1e-6)).epsilon(1e-12));
}

TEST_CASE("pair pooling matches closed-form statistics") {
  // n = 2, d = 1: rows for i=0 are {1, 3}, for i=1 {2, 2}.
  Tensor p = Tensor::from_data({4, 1}, {1, 3, 2, 2});
  Tensor s = pair_pool_stats(p, 2);
  REQUIRE(s.shape() == Shape{2, 4});
  auto v = s.data();
  CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-12));   // mean
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-12));   // min
  CHECK(v[2] == doctest::Approx(3.0).epsilon(1e-12));   // max
  CHECK(v[3] == doctest::Approx(1.0).epsilon(1e-9));    // population std
  CHECK(v[4] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(v[7]) <= 1e-5);  // zero spread up to the gradient guard

  // Single node: std is exactly zero. Layout is [mean, min, max, std] per
  // feature column: [5, -3, 5, -3, 5, -3, 0, 0].
  Tensor single = Tensor::from_data({1, 2}, {5, -3});
  Tensor ss = pair_pool_stats(single, 1);
  CHECK(ss.data()[6] == 0.0);
  CHECK(ss.data()[7] == 0.0);
  CHECK(ss.data()[0] == 5.0);
  CHECK(ss.data()[4] == 5.0);
}

TEST_CASE("freshly constructed model echoes input coordinates") {
  Vocab v;
  Denoiser model = tiny_model();
  auto g = moldata::to_onehot(testfix::methane(), v);
  auto out = model.forward(g, 10);

  REQUIRE(out.R_hat.shape() == g.R.shape());
  CHECK(testfix::max_abs_diff(out.R_hat.data(), g.R.data()) < 1e-12);

  // Probability rows sum to one.
  for (const Tensor* p : {&out.pX, &out.pC}) {
    auto d = p->data();
    const int cols = static_cast<int>(p->dim(1));
    for (int i = 0; i < p->dim(0); ++i) {
      double s = 0;
      for (int j = 0; j < cols; ++j) s += d[static_cast<size_t>(i * cols + j)];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("timestep changes the prediction and range is enforced") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 3);
  auto g = moldata::to_onehot(testfix::water(), v);
  auto a = model.forward(g, 1);
  auto b = model.forward(g, 90);
  double diff = 0;
  for (size_t i = 0; i < a.pX.data().size(); ++i)
    diff = std::max(diff, std::abs(a.pX.data()[i] - b.pX.data()[i]));
  CHECK(diff > 1e-6);

  CHECK_THROWS_AS(model.forward(g, -1), std::invalid_argument);
  CHECK_THROWS_AS(model.forward(g, 101), std::invalid_argument);
  CHECK_NOTHROW(model.forward(g, 0));
  CHECK_NOTHROW(model.forward(g, 100));
}

TEST_CASE("forward is deterministic") {
  Vocab v;
  auto g = moldata::to_onehot(testfix::ethanol(), v);
  Denoiser m1 = tiny_model(42);
  Denoiser m2 = tiny_model(42);
  randomize_params(m1, 9);
  randomize_params(m2, 9);
  auto a = m1.forward(g, 17);
  auto b = m2.forward(g, 17);
  auto bits_equal = [](const Tensor& x, const Tensor& y) {
    return std::equal(x.data().begin(), x.data().end(), y.data().begin(),
                      y.data().end());
  };
  CHECK(bits_equal(a.R_hat, b.R_hat));
  CHECK(bits_equal(a.pX, b.pX));
  CHECK(bits_equal(a.pC, b.pC));
  CHECK(bits_equal(a.pY, b.pY));
}

TEST_CASE("rotation equivariance of coordinates, invariance of categoricals") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 5);
  Rng rng(100);

  for (const auto& mol : {testfix::water(), testfix::ethanol()}) {
    auto g = moldata::to_onehot(mol, v);
    auto base = model.forward(g, 25);
    for (int trial = 0; trial < 5; ++trial) {
      auto rot = testfix::random_rotation(rng);
      auto grot = rotated_graph(g, rot);
      auto out = model.forward(grot, 25);
      auto expected = testfix::rotate_coords(base.R_hat.data(), rot);
      CHECK(testfix::max_abs_diff(out.R_hat.data(), expected) < 1e-8);
      CHECK(testfix::max_abs_diff(out.pX.data(), base.pX.data()) < 1e-8);
      CHECK(testfix::max_abs_diff(out.pC.data(), base.pC.data()) < 1e-8);
      CHECK(testfix::max_abs_diff(out.pY.data(), base.pY.data()) < 1e-8);
    }
  }
}

TEST_CASE("permutation equivariance") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 5);
  Rng rng(200);

  const auto mol = testfix::ethanol();
  const int n = mol.n();
  auto g = moldata::to_onehot(mol, v);
  auto base = model.forward(g, 40);

  for (int trial = 0; trial < 5; ++trial) {
    auto perm = testfix::random_permutation(n, rng);
    auto gp = moldata::to_onehot(testfix::permute(mol, perm), v);
    auto out = model.forward(gp, 40);

    // Row i of the permuted output is row perm[i] of the base output.
    auto check_rows = [&](const Tensor& p, const Tensor& pb, int cols) {
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < cols; ++c) {
          double got = p.data()[static_cast<size_t>(i * cols + c)];
          double want = pb.data()[static_cast<size_t>(perm[i] * cols + c)];
          CHECK(std::abs(got - want) < 1e-8);
        }
    };
    check_rows(out.pX, base.pX, v.n_atom_types());
    check_rows(out.pC, base.pC, v.n_charge_types());
    check_rows(out.R_hat, base.R_hat, 3);

    const int b = moldata::kBondTypes;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < b; ++k) {
          double got = out.pY.data()[static_cast<size_t>((i * n + j) * b + k)];
          double want = base.pY.data()[static_cast<size_t>(
              (perm[i] * n + perm[j]) * b + k)];
          CHECK(std::abs(got - want) < 1e-8);
        }
  }
}

TEST_CASE("every coordinate sublayer stays in the zero-CoM subspace") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 13);

  std::map<std::string, double> worst;
  model.coord_probe = [&](const std::string& label, const Tensor& R) {
    double c = com_norm(R);
    auto [it, inserted] = worst.emplace(label, c);
    if (!inserted) it->second = std::max(it->second, c);
  };

  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = moldata::to_onehot(testfix::random_molecule(rng), v);
    model.forward(g, 1 + int(rng.uniform_int(100)));
  }
  // input, 2 blocks x 2 coordinate sublayers, head.
  CHECK(worst.size() == 6);
  for (const auto& [label, c] : worst) {
    INFO(label);
    CHECK(c < 1e-9);
  }
}

TEST_CASE("bond probabilities are exactly symmetric") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 21);
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto g = moldata::to_onehot(testfix::random_molecule(rng), v);
    const int n = g.n();
    auto out = model.forward(g, 50);
    const int b = moldata::kBondTypes;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < b; ++k) {
          double pij = out.pY.data()[static_cast<size_t>((i * n + j) * b + k)];
          double pji = out.pY.data()[static_cast<size_t>((j * n + i) * b + k)];
          CHECK(pij == pji);  // bitwise: symmetrized logits commute
        }
  }
}

TEST_CASE("single-atom graphs are handled") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 4);
  moldata::Molecule m(1);
  m.set_atom(0, testfix::O);
  auto g = moldata::to_onehot(m, v);
  auto out = model.forward(g, 30);
  CHECK_FALSE(out.pX.has_nonfinite());
  CHECK_FALSE(out.pY.has_nonfinite());
  CHECK_FALSE(out.R_hat.has_nonfinite());
  // A single centered atom sits at the origin and must stay there.
  CHECK(std::abs(out.R_hat.data()[0]) < 1e-12);
}

TEST_CASE("analytic gradients match finite differences through the model") {
  Vocab v;
  Denoiser model = tiny_model();
  randomize_params(model, 55, 0.2);
  // A random geometry avoids the exact symmetries of idealized molecules,
  // which park the min/max pooling on tied (non-differentiable) points.
  Rng mol_rng(123);
  auto g = moldata::to_onehot(testfix::random_molecule(mol_rng, 4, 4), v);

  // Scalar probe touching every output head.
  auto f = [&]() {
    auto out = model.forward(g, 33);
    Tensor lx = sum(log(out.pX + 1e-9));
    Tensor ly = sum(log(out.pY + 1e-9));
    Tensor lr = sum(out.R_hat * out.R_hat);
    return lx + ly + lr + sum(log(out.pC + 1e-9));
  };

  std::vector<Tensor> leaves;
  for (auto& [name, t] : model.params().entries()) leaves.push_back(t);
  Rng rng(6);
  // reg = 1e-5 floors the comparison at the finite-difference noise level
  // (the loss is O(30), so central differences carry ~1e-9 absolute noise).
  double err = grad_check_sampled(f, leaves, 2, rng, 1e-4, 1e-5);
  CHECK(err < 1e-3);
}

TEST_CASE("config validation rejects bad settings") {
  DenoiserConfig cfg = tiny_config();
  cfg.n_heads = 3;  // does not divide node_dim = 16
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.n_layers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.t_emb_dim = 7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(tiny_config().validate());
}
