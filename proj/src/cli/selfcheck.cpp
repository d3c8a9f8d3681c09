// SPDX-License-Identifier: Apache-2.0
//
// Fast invariant suite behind `midi selfcheck`. Every check re-derives a
// closed-form quantity from first principles (brute-force enumeration, Monte
// Carlo, finite differences) and compares it against the library value, so a
// regression in any core identity shows up as a named failure line.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "midi/cli/commands.hpp"
#include "midi/denoiser/model.hpp"
#include "midi/moldata/dataset.hpp"
#include "midi/moldata/molecule.hpp"
#include "midi/noise/corrupt.hpp"
#include "midi/noise/gaussian.hpp"
#include "midi/noise/schedule.hpp"
#include "midi/noise/transition.hpp"
#include "midi/numkit/grad_check.hpp"
#include "midi/numkit/rng.hpp"
#include "midi/sampling/sampler.hpp"
#include "midi/training/adam.hpp"
#include "midi/training/checkpoint.hpp"
#include "midi/training/loss.hpp"
#include "midi/training/trainer.hpp"

namespace midi::cli {

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Small model used by the structural checks; large enough to exercise every
// sublayer, small enough that the whole suite stays well under a minute.
denoiser::DenoiserConfig tiny_config() {
  denoiser::DenoiserConfig cfg;
  cfg.n_layers = 2;
  cfg.node_dim = 16;
  cfg.edge_dim = 8;
  cfg.global_dim = 16;
  cfg.n_heads = 2;
  cfg.t_emb_dim = 8;
  cfg.pos_hidden = 8;
  cfg.max_timestep = 10;
  return cfg;
}

moldata::Molecule make_methane() {
  moldata::Molecule m(5);
  m.set_atom(0, 1);  // C
  const double d = 1.09 / std::sqrt(3.0);
  const double pos[5][3] = {
      {0, 0, 0}, {d, d, d}, {d, -d, -d}, {-d, d, -d}, {-d, -d, d}};
  for (int i = 1; i < 5; ++i) {
    m.set_atom(i, 0);  // H
    m.set_bond(0, i, moldata::Bond::Single);
  }
  for (int i = 0; i < 5; ++i)
    m.set_coord(i, {pos[i][0], pos[i][1], pos[i][2]});
  m.center();
  return m;
}

moldata::Molecule make_water() {
  moldata::Molecule m(3);
  m.set_atom(0, 3);  // O
  m.set_atom(1, 0);
  m.set_atom(2, 0);
  m.set_coord(0, {0, 0, 0});
  m.set_coord(1, {0.96, 0, 0});
  m.set_coord(2, {-0.24, 0.93, 0});
  m.set_bond(0, 1, moldata::Bond::Single);
  m.set_bond(0, 2, moldata::Bond::Single);
  m.center();
  return m;
}

// --- individual checks; each fills `detail` on failure -------------------

bool check_discrete_posterior(std::string& detail) {
  const std::vector<std::vector<double>> marginals = {
      {0.5, 0.3, 0.2}, {0.3, 0.25, 0.2, 0.15, 0.1}};
  const double configs[][2] = {
      {0.9, 0.8}, {0.5, 0.25}, {0.99, 0.01}, {0.7, 0.7}};
  double worst = 0.0;
  for (const auto& m : marginals) {
    noise::MarginalTransition tr(m);
    const int d = tr.dim();
    for (const auto& cfg : configs) {
      const double alpha_t = cfg[0], abar_prev = cfg[1];
      std::vector<double> q = tr.q_matrix(alpha_t);
      std::vector<double> qbar = tr.q_bar_matrix(abar_prev);
      for (int x = 0; x < d; ++x) {
        for (int z = 0; z < d; ++z) {
          // Brute force: P(z_{t-1}=k | z_t=z, x) from the joint over k.
          std::vector<double> brute(d);
          double total = 0.0;
          for (int k = 0; k < d; ++k) {
            brute[k] = q[k * d + z] * qbar[x * d + k];
            total += brute[k];
          }
          for (double& v : brute) v /= total;
          std::vector<double> got = tr.posterior(z, x, alpha_t, abar_prev);
          for (int k = 0; k < d; ++k)
            worst = std::max(worst, std::abs(got[k] - brute[k]));
        }
      }
    }
  }
  detail = "max deviation " + fmt_g(worst);
  return worst < 1e-12;
}

bool check_final_step_coeffs(bool flip_mu_sign, std::string& detail) {
  for (double nu : {1.0, 2.5}) {
    for (int T : {10, 100}) {
      noise::ComponentSchedule sch(T, nu);
      noise::GaussianPosteriorCoeffs c = noise::gaussian_posterior_coeffs(sch, 1);
      if (flip_mu_sign) c.mu = -c.mu;
      if (!(c.mu == 1.0 && c.nu == 0.0 && c.sigma == 0.0)) {
        detail = "at T=" + std::to_string(T) + " got (" + fmt_g(c.mu) + ", " +
                 fmt_g(c.nu) + ", " + fmt_g(c.sigma) + "), want (1, 0, 0)";
        return false;
      }
    }
  }
  detail = "(1, 0, 0) exactly";
  return true;
}

bool check_posterior_moments(std::string& detail) {
  const int n = 4, t = 50, draws = 40000;
  noise::ComponentSchedule sch(100, 2.5);
  noise::GaussianPosteriorCoeffs c = noise::gaussian_posterior_coeffs(sch, t);
  numkit::Rng rng(numkit::derive_seed(0xC0FFEE, 1));
  std::vector<double> x_hat = noise::sample_projected_noise(n, rng);
  std::vector<double> r_t = noise::sample_projected_noise(n, rng);
  const size_t dim = x_hat.size();
  std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
  for (int k = 0; k < draws; ++k) {
    std::vector<double> s =
        noise::gaussian_posterior_sample(x_hat, r_t, n, sch, t, rng);
    for (size_t i = 0; i < dim; ++i) {
      sum[i] += s[i];
      sumsq[i] += s[i] * s[i];
    }
  }
  // Projected noise carries variance sigma^2 * (1 - 1/n) per coordinate.
  const double want_var = c.sigma * c.sigma * (1.0 - 1.0 / n);
  double worst_mean = 0.0, var_sum = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    const double mean = sum[i] / draws;
    const double want_mean = c.mu * x_hat[i] + c.nu * r_t[i];
    worst_mean = std::max(worst_mean, std::abs(mean - want_mean));
    var_sum += sumsq[i] / draws - mean * mean;
  }
  const double var_ratio = (var_sum / static_cast<double>(dim)) / want_var;
  detail = "mean off by " + fmt_g(worst_mean) + ", variance ratio " +
           fmt_g(var_ratio);
  return worst_mean < 0.03 * c.sigma && std::abs(var_ratio - 1.0) < 0.05;
}

bool check_schedule_invariants(std::string& detail) {
  noise::NoiseSchedule sch = noise::NoiseSchedule::build(100, 2.5, 1.0, 1.0, 1.5);
  for (const noise::ComponentSchedule* comp : {&sch.r, &sch.x, &sch.c, &sch.y}) {
    if (comp->alpha_bar(0) != 1.0) {
      detail = "alpha_bar(0) != 1";
      return false;
    }
    for (int t = 1; t <= sch.T; ++t) {
      if (!(comp->alpha_bar(t) < comp->alpha_bar(t - 1))) {
        detail = "alpha_bar not strictly decreasing at t=" + std::to_string(t);
        return false;
      }
      const double a = comp->alpha_bar(t);
      if (a * a + comp->sigma_bar_sq(t) != 1.0) {
        detail = "alpha_bar^2 + sigma_bar^2 != 1 at t=" + std::to_string(t);
        return false;
      }
    }
  }
  for (int t = 0; t <= sch.T; ++t) {
    // Larger nu keeps more signal at every step of the same schedule length.
    if (sch.r.alpha_bar(t) < sch.x.alpha_bar(t)) {
      detail = "nu=2.5 fell below nu=1 at t=" + std::to_string(t);
      return false;
    }
  }
  detail = "monotone, variance-preserving, nu-ordered";
  return true;
}

bool check_cumulative_transitions(std::string& detail) {
  noise::MarginalTransition tr({0.6, 0.2, 0.15, 0.05});
  const int d = tr.dim();
  noise::ComponentSchedule sch(100, 1.5);
  std::vector<double> prod(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) prod[i * d + i] = 1.0;
  double worst = 0.0;
  for (int t = 1; t <= sch.T(); ++t) {
    std::vector<double> q = tr.q_matrix(sch.alpha(t));
    std::vector<double> next(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j)
          next[i * d + j] += prod[i * d + k] * q[k * d + j];
    prod = next;
    std::vector<double> qbar = tr.q_bar_matrix(sch.alpha_bar(t));
    for (size_t i = 0; i < prod.size(); ++i)
      worst = std::max(worst, std::abs(prod[i] - qbar[i]));
  }
  detail = "max deviation " + fmt_g(worst) + " over 100 steps";
  return worst < 1e-10;
}

bool check_stationary_marginal(std::string& detail) {
  noise::MarginalTransition tr({0.45, 0.3, 0.15, 0.1});
  const int d = tr.dim();
  double worst = 0.0;
  for (double alpha : {0.99, 0.9, 0.5, 0.1}) {
    std::vector<double> q = tr.q_matrix(alpha);
    for (int j = 0; j < d; ++j) {
      double mj = 0.0;
      for (int i = 0; i < d; ++i) mj += tr.marginal()[i] * q[i * d + j];
      worst = std::max(worst, std::abs(mj - tr.marginal()[j]));
    }
  }
  detail = "max |mQ - m| " + fmt_g(worst);
  return worst < 1e-12;
}

bool check_rotation_equivariance(std::string& detail) {
  moldata::Vocab vocab;
  denoiser::Denoiser model(tiny_config(), vocab.n_atom_types(),
                           vocab.n_charge_types(), moldata::kBondTypes, 17);
  moldata::Molecule mol(5);
  const int types[5] = {1, 1, 3, 0, 0};
  const double pos[5][3] = {{0.1, -0.4, 0.9},
                            {1.4, 0.2, 0.6},
                            {-1.0, 0.8, -0.3},
                            {0.5, 1.1, -1.2},
                            {-0.9, -1.3, 0.2}};
  for (int i = 0; i < 5; ++i) {
    mol.set_atom(i, types[i]);
    mol.set_coord(i, {pos[i][0], pos[i][1], pos[i][2]});
  }
  mol.set_bond(0, 1, moldata::Bond::Single);
  mol.set_bond(1, 2, moldata::Bond::Single);
  mol.set_bond(0, 3, moldata::Bond::Single);
  mol.set_bond(0, 4, moldata::Bond::Single);
  mol.center();

  // Rodrigues rotation about a fixed axis.
  const double angle = 0.7;
  double axis[3] = {1.0, 2.0, 3.0};
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] +
                                axis[2] * axis[2]);
  for (double& a : axis) a /= norm;
  const double ca = std::cos(angle), sa = std::sin(angle);
  double rot[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rot[i][j] = ca * (i == j ? 1.0 : 0.0) + (1.0 - ca) * axis[i] * axis[j];
  rot[0][1] -= sa * axis[2];
  rot[0][2] += sa * axis[1];
  rot[1][0] += sa * axis[2];
  rot[1][2] -= sa * axis[0];
  rot[2][0] -= sa * axis[1];
  rot[2][1] += sa * axis[0];

  moldata::Molecule turned = mol;
  for (int i = 0; i < 5; ++i) {
    const auto& p = mol.coord(i);
    std::array<double, 3> q{};
    for (int r = 0; r < 3; ++r)
      q[r] = rot[r][0] * p[0] + rot[r][1] * p[1] + rot[r][2] * p[2];
    turned.set_coord(i, q);
  }

  numkit::NoGradGuard ng;
  denoiser::DenoiserOutput base = model.forward(moldata::to_onehot(mol, vocab), 3);
  denoiser::DenoiserOutput other =
      model.forward(moldata::to_onehot(turned, vocab), 3);

  double worst = 0.0;
  auto max_diff = [](const numkit::Tensor& a, const numkit::Tensor& b) {
    double w = 0.0;
    auto da = a.data(), db = b.data();
    for (size_t i = 0; i < da.size(); ++i)
      w = std::max(w, std::abs(da[i] - db[i]));
    return w;
  };
  worst = std::max(worst, max_diff(base.pX, other.pX));
  worst = std::max(worst, max_diff(base.pC, other.pC));
  worst = std::max(worst, max_diff(base.pY, other.pY));
  auto rb = base.R_hat.data();
  auto ro = other.R_hat.data();
  for (int i = 0; i < 5; ++i)
    for (int r = 0; r < 3; ++r) {
      const double want = rot[r][0] * rb[i * 3 + 0] + rot[r][1] * rb[i * 3 + 1] +
                          rot[r][2] * rb[i * 3 + 2];
      worst = std::max(worst, std::abs(ro[i * 3 + r] - want));
    }
  detail = "max deviation " + fmt_g(worst);
  return worst < 1e-8;
}

bool check_trajectory_centered(std::string& detail) {
  moldata::Vocab vocab;
  std::vector<moldata::Molecule> corpus = {make_methane(), make_water()};
  moldata::Marginals marg = moldata::compute_marginals(corpus, vocab);
  noise::TransitionSet transitions = noise::TransitionSet::from_marginals(marg);
  noise::NoiseSchedule sch = noise::NoiseSchedule::build(8, 2.5, 1.0, 1.0, 1.5);
  denoiser::Denoiser model(tiny_config(), vocab.n_atom_types(),
                           vocab.n_charge_types(), moldata::kBondTypes, 23);
  sampling::DenoiserPredictor predictor(model);
  sampling::Sampler sampler(predictor, sch, transitions, vocab,
                            {0.0, 0.0, 0.25, 0.25, 0.25, 0.25});
  double worst = 0.0;
  sampler.state_probe = [&](int, const moldata::OneHotGraph& g) {
    auto r = g.R.data();
    const int n = g.n();
    double com[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k) com[k] += r[i * 3 + k];
    double sq = 0.0;
    for (double c : com) sq += (c / n) * (c / n);
    worst = std::max(worst, std::sqrt(sq));
  };
  sampler.sample(4, 99);
  detail = "worst centre-of-mass norm " + fmt_g(worst);
  return worst < 1e-9;
}

bool check_gradients(std::string& detail) {
  moldata::Vocab vocab;
  denoiser::Denoiser model(tiny_config(), vocab.n_atom_types(),
                           vocab.n_charge_types(), moldata::kBondTypes, 31);
  moldata::OneHotGraph clean = moldata::to_onehot(make_methane(), vocab);
  moldata::Marginals marg =
      moldata::compute_marginals({make_methane(), make_water()}, vocab);
  noise::TransitionSet transitions = noise::TransitionSet::from_marginals(marg);
  noise::NoiseSchedule sch = noise::NoiseSchedule::build(8, 2.5, 1.0, 1.0, 1.5);
  numkit::Rng rng(numkit::derive_seed(0xC0FFEE, 2));
  moldata::OneHotGraph noisy = noise::corrupt(clean, sch, transitions, 3, rng);
  training::LossWeights weights;
  auto f = [&]() {
    return training::diffusion_loss(model.forward(noisy, 3), clean, weights)
        .total;
  };
  std::vector<numkit::Tensor> leaves;
  for (const auto& [name, tensor] : model.params().entries())
    leaves.push_back(tensor);
  numkit::Rng pick(numkit::derive_seed(0xC0FFEE, 3));
  const double worst =
      numkit::grad_check_sampled(f, leaves, 1, pick, 1e-4, 1e-5);
  detail = "worst relative gradient error " + fmt_g(worst);
  return worst < 1e-3;
}

bool check_checkpoint_roundtrip(std::string& detail) {
  namespace fs = std::filesystem;
  moldata::Vocab vocab;
  denoiser::Denoiser a(tiny_config(), vocab.n_atom_types(),
                       vocab.n_charge_types(), moldata::kBondTypes, 41);
  training::Adam adam(a.params(), training::AdamConfig{});
  numkit::Rng rng(7);
  rng.normal();  // advance so the stream state is non-trivial
  training::Checkpoint ck = training::make_checkpoint(
      "selfcheck-config", a.params(), &adam, rng.save_state(), 42);
  const fs::path path = fs::temp_directory_path() / "midi_selfcheck.ckpt";
  training::save_checkpoint(path.string(), ck);
  training::Checkpoint back = training::load_checkpoint(path.string());
  fs::remove(path);
  if (back.config_text != ck.config_text || back.global_step != 42 ||
      back.rng_state != ck.rng_state) {
    detail = "metadata changed across the round trip";
    return false;
  }
  denoiser::Denoiser b(tiny_config(), vocab.n_atom_types(),
                       vocab.n_charge_types(), moldata::kBondTypes, 43);
  training::Adam adam_b(b.params(), training::AdamConfig{});
  training::restore_checkpoint(back, b.params(), &adam_b);
  const auto& ea = a.params().entries();
  const auto& eb = b.params().entries();
  for (size_t i = 0; i < ea.size(); ++i) {
    auto da = ea[i].second.data(), db = eb[i].second.data();
    for (size_t k = 0; k < da.size(); ++k)
      if (da[k] != db[k]) {
        detail = "parameter " + ea[i].first + " not bitwise equal";
        return false;
      }
  }
  detail = "bitwise exact";
  return true;
}

}  // namespace

int cmd_selfcheck(bool flip_mu_sign, std::ostream& out, std::ostream& err) {
  struct Entry {
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Entry> checks = {
      {"discrete posterior matches enumeration", check_discrete_posterior},
      {"final reverse step is deterministic",
       [flip_mu_sign](std::string& d) {
         return check_final_step_coeffs(flip_mu_sign, d);
       }},
      {"posterior sample moments match coefficients", check_posterior_moments},
      {"schedules decrease and preserve variance", check_schedule_invariants},
      {"cumulative transitions equal step products", check_cumulative_transitions},
      {"marginal is stationary under transitions", check_stationary_marginal},
      {"denoiser rotation equivariance", check_rotation_equivariance},
      {"reverse trajectory stays centered", check_trajectory_centered},
      {"analytic gradients match finite differences", check_gradients},
      {"checkpoint round trip is bitwise exact", check_checkpoint_roundtrip},
  };
  int failures = 0;
  for (const auto& check : checks) {
    bool ok = false;
    std::string detail;
    try {
      ok = check.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    out << (ok ? "[ ok ] " : "[FAIL] ") << check.name;
    if (!detail.empty()) out << " — " << detail;
    out << "\n";
    if (!ok) ++failures;
  }
  if (failures > 0) {
    err << "selfcheck: " << failures << " of " << checks.size()
        << " checks failed\n";
    return kExitFailure;
  }
  out << "selfcheck: all " << checks.size() << " checks passed\n";
  return kExitOk;
}

}  // namespace midi::cli
