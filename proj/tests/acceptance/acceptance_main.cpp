// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance harness: nine independent criteria, one PASS/FAIL
// line each, nonzero exit if any fail. Optional argv: a list of criterion
// numbers to run (default: all). Criterion 6 trains the bundled model and
// dominates the runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "midi/cli/commands.hpp"
#include "midi/cli/run_config.hpp"
#include "midi/denoiser/model.hpp"
#include "midi/metrics/metrics.hpp"
#include "midi/moldata/dataset.hpp"
#include "midi/moldata/io.hpp"
#include "midi/moldata/molecule.hpp"
#include "midi/moldata/valency.hpp"
#include "midi/noise/corrupt.hpp"
#include "midi/noise/gaussian.hpp"
#include "midi/noise/schedule.hpp"
#include "midi/noise/transition.hpp"
#include "midi/numkit/grad_check.hpp"
#include "midi/numkit/rng.hpp"
#include "midi/numkit/tensor.hpp"
#include "midi/sampling/bond_lookup.hpp"
#include "midi/sampling/sampler.hpp"
#include "midi/training/loss.hpp"

using namespace midi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::vector<double> random_marginal(int d, numkit::Rng& rng) {
  std::vector<double> m(d);
  double total = 0.0;
  for (double& v : m) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (double& v : m) v /= total;
  return m;
}

moldata::Molecule perturbed(const moldata::Molecule& mol, double sigma,
                            numkit::Rng& rng) {
  moldata::Molecule noisy = mol;
  for (int i = 0; i < noisy.n(); ++i) {
    auto p = noisy.coord(i);
    for (double& c : p) c += sigma * rng.normal();
    noisy.set_coord(i, p);
  }
  return noisy;
}

bool bonds_match(const moldata::Molecule& a, const moldata::Molecule& b) {
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      if (a.bond(i, j) != b.bond(i, j)) return false;
  return true;
}

double com_norm(const numkit::Tensor& coords, int n) {
  auto r = coords.data();
  double com[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) com[k] += r[i * 3 + k];
  double sq = 0.0;
  for (double c : com) sq += (c / n) * (c / n);
  return std::sqrt(sq);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// 1. Discrete posterior against brute-force Bayes enumeration.
bool criterion1(std::string& note) {
  const auto start = Clock::now();
  numkit::Rng rng(numkit::derive_seed(1, 0xACC));
  double worst_post = 0.0, worst_marg = 0.0;
  for (int d : {2, 3, 5}) {
    for (int rep = 0; rep < 100; ++rep) {
      noise::MarginalTransition tr(random_marginal(d, rng));
      const double alpha_t = 0.02 + 0.96 * rng.uniform();
      const double abar_prev = 0.02 + 0.96 * rng.uniform();
      const int z_t = static_cast<int>(rng.uniform_int(d));
      const int x = static_cast<int>(rng.uniform_int(d));
      std::vector<double> q = tr.q_matrix(alpha_t);
      std::vector<double> qbar = tr.q_bar_matrix(abar_prev);

      std::vector<double> brute(d);
      double total = 0.0;
      for (int k = 0; k < d; ++k) {
        brute[k] = q[k * d + z_t] * qbar[x * d + k];
        total += brute[k];
      }
      for (double& v : brute) v /= total;
      std::vector<double> got = tr.posterior(z_t, x, alpha_t, abar_prev);
      for (int k = 0; k < d; ++k)
        worst_post = std::max(worst_post, std::abs(got[k] - brute[k]));

      std::vector<double> pred = random_marginal(d, rng);
      std::vector<double> oracle(d, 0.0);
      for (int xx = 0; xx < d; ++xx) {
        std::vector<double> row(d);
        double tot = 0.0;
        for (int k = 0; k < d; ++k) {
          row[k] = q[k * d + z_t] * qbar[xx * d + k];
          tot += row[k];
        }
        for (int k = 0; k < d; ++k) oracle[k] += pred[xx] * row[k] / tot;
      }
      std::vector<double> marg =
          tr.marginalized_reverse(pred, z_t, alpha_t, abar_prev);
      for (int k = 0; k < d; ++k)
        worst_marg = std::max(worst_marg, std::abs(marg[k] - oracle[k]));
    }
  }
  const double elapsed = seconds_since(start);
  note = "posterior dev " + fmt("%.2e", worst_post) + ", marginalized dev " +
         fmt("%.2e", worst_marg) + ", " + fmt("%.2f s", elapsed);
  return worst_post < 1e-12 && worst_marg < 1e-12 && elapsed < 5.0;
}

// ---------------------------------------------------------------------------
// 2. Gaussian posterior: exact final step plus Monte-Carlo moments.
bool criterion2(std::string& note) {
  const auto start = Clock::now();
  noise::ComponentSchedule sch(100, 2.5);
  noise::GaussianPosteriorCoeffs c1 = noise::gaussian_posterior_coeffs(sch, 1);
  if (!(c1.mu == 1.0 && c1.nu == 0.0 && c1.sigma == 0.0)) {
    note = "final-step coefficients not exactly (1, 0, 0)";
    return false;
  }

  numkit::Rng rng(numkit::derive_seed(2, 0xACC));
  const int n = 4, draws = 100000;
  double worst_mean = 0.0, worst_var = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const int t = 2 + static_cast<int>(rng.uniform_int(sch.T() - 1));
    noise::GaussianPosteriorCoeffs c = noise::gaussian_posterior_coeffs(sch, t);
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
    double mean_err_sq = 0.0, mean_norm_sq = 0.0, var_mean = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      const double mean = sum[i] / draws;
      const double want = c.mu * x_hat[i] + c.nu * r_t[i];
      mean_err_sq += (mean - want) * (mean - want);
      mean_norm_sq += want * want;
      var_mean += (sumsq[i] / draws - mean * mean) / static_cast<double>(dim);
    }
    // Projected noise has per-coordinate variance sigma^2 * (1 - 1/n).
    const double want_var = c.sigma * c.sigma * (1.0 - 1.0 / n);
    worst_mean = std::max(
        worst_mean, std::sqrt(mean_err_sq) / std::sqrt(mean_norm_sq));
    worst_var = std::max(worst_var, std::abs(var_mean / want_var - 1.0));
  }
  const double elapsed = seconds_since(start);
  note = "mean err " + fmt("%.4f", worst_mean) + ", var err " +
         fmt("%.4f", worst_var) + " over 1e5 draws, " + fmt("%.1f s", elapsed);
  return worst_mean < 0.01 && worst_var < 0.01 && elapsed < 30.0;
}

// ---------------------------------------------------------------------------
// 3. Schedule properties and cumulative-transition consistency.
bool criterion3(std::string& note) {
  for (double nu : {1.0, 1.5, 2.5, 3.0}) {
    noise::ComponentSchedule sch(200, nu);
    if (sch.alpha_bar(0) != 1.0) {
      note = "alpha_bar(0) != 1 for nu " + fmt("%.1f", nu);
      return false;
    }
    for (int t = 1; t <= 200; ++t) {
      if (!(sch.alpha_bar(t) < sch.alpha_bar(t - 1))) {
        note = "alpha_bar not strictly decreasing (nu " + fmt("%.1f", nu) +
               ", t " + std::to_string(t) + ")";
        return false;
      }
      const double a = sch.alpha_bar(t);
      if (a * a + sch.sigma_bar_sq(t) != 1.0) {
        note = "variance-preserving identity broken at t " + std::to_string(t);
        return false;
      }
    }
  }
  for (int T : {100, 200, 500}) {
    noise::ComponentSchedule hi(T, 2.5), lo(T, 1.0);
    for (int t = 0; t <= T; ++t) {
      if (hi.alpha_bar(t) < lo.alpha_bar(t)) {
        note = "nu=2.5 schedule fell below nu=1 at t " + std::to_string(t) +
               " of T " + std::to_string(T);
        return false;
      }
    }
  }

  numkit::Rng rng(numkit::derive_seed(3, 0xACC));
  noise::MarginalTransition tr(random_marginal(5, rng));
  const int d = tr.dim();
  noise::ComponentSchedule sch(200, 1.5);
  std::vector<double> prod(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) prod[i * d + i] = 1.0;
  double worst_qbar = 0.0;
  for (int t = 1; t <= 200; ++t) {
    std::vector<double> q = tr.q_matrix(sch.alpha(t));
    std::vector<double> next(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j)
          next[i * d + j] += prod[i * d + k] * q[k * d + j];
    prod = std::move(next);
    std::vector<double> qbar = tr.q_bar_matrix(sch.alpha_bar(t));
    worst_qbar = std::max(worst_qbar, max_abs_diff(prod, qbar));
  }
  double worst_stat = 0.0;
  for (int t = 1; t <= 200; ++t) {
    std::vector<double> q = tr.q_matrix(sch.alpha(t));
    for (int j = 0; j < d; ++j) {
      double mj = 0.0;
      for (int i = 0; i < d; ++i) mj += tr.marginal()[i] * q[i * d + j];
      worst_stat = std::max(worst_stat, std::abs(mj - tr.marginal()[j]));
    }
  }
  note = "cumulative dev " + fmt("%.2e", worst_qbar) + ", stationarity dev " +
         fmt("%.2e", worst_stat);
  return worst_qbar < 1e-10 && worst_stat < 1e-12;
}

// ---------------------------------------------------------------------------
// 4. Equivariance: rotations, permutations, zero-CoM everywhere.
bool criterion4(std::string& note) {
  moldata::Vocab vocab;
  std::vector<moldata::Molecule> corpus =
      moldata::read_jsonl(MIDI_ROOT "/assets/corpus.jsonl", vocab);
  const moldata::Molecule* pick = nullptr;
  for (const auto& mol : corpus)
    if (mol.n() == 9) {
      pick = &mol;
      break;
    }
  if (!pick) {
    note = "no 9-atom molecule in the bundled corpus";
    return false;
  }
  const moldata::Molecule& mol = *pick;

  denoiser::DenoiserConfig cfg;  // full-size defaults
  cfg.max_timestep = 100;
  denoiser::Denoiser model(cfg, vocab.n_atom_types(), vocab.n_charge_types(),
                           moldata::kBondTypes, 99);
  numkit::NoGradGuard ng;
  const moldata::OneHotGraph base_graph = moldata::to_onehot(mol, vocab);
  denoiser::DenoiserOutput base = model.forward(base_graph, 17);

  numkit::Rng rng(numkit::derive_seed(4, 0xACC));
  double worst_rot = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    double axis[3], nrm = 0.0;
    for (double& a : axis) a = rng.normal();
    for (double a : axis) nrm += a * a;
    nrm = std::sqrt(nrm);
    for (double& a : axis) a /= nrm;
    const double th = 2.0 * 3.14159265358979323846 * rng.uniform();
    const double ca = std::cos(th), sa = std::sin(th);
    double rot[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        rot[i][j] =
            ca * (i == j ? 1.0 : 0.0) + (1.0 - ca) * axis[i] * axis[j];
    rot[0][1] -= sa * axis[2];
    rot[0][2] += sa * axis[1];
    rot[1][0] += sa * axis[2];
    rot[1][2] -= sa * axis[0];
    rot[2][0] -= sa * axis[1];
    rot[2][1] += sa * axis[0];

    moldata::Molecule turned = mol;
    for (int i = 0; i < mol.n(); ++i) {
      const auto& p = mol.coord(i);
      turned.set_coord(i, {rot[0][0] * p[0] + rot[0][1] * p[1] + rot[0][2] * p[2],
                           rot[1][0] * p[0] + rot[1][1] * p[1] + rot[1][2] * p[2],
                           rot[2][0] * p[0] + rot[2][1] * p[1] + rot[2][2] * p[2]});
    }
    denoiser::DenoiserOutput out =
        model.forward(moldata::to_onehot(turned, vocab), 17);
    worst_rot = std::max(worst_rot, max_abs_diff(base.pX.data(), out.pX.data()));
    worst_rot = std::max(worst_rot, max_abs_diff(base.pC.data(), out.pC.data()));
    worst_rot = std::max(worst_rot, max_abs_diff(base.pY.data(), out.pY.data()));
    auto rb = base.R_hat.data();
    auto ro = out.R_hat.data();
    for (int i = 0; i < mol.n(); ++i)
      for (int r = 0; r < 3; ++r) {
        const double want = rot[r][0] * rb[i * 3 + 0] +
                            rot[r][1] * rb[i * 3 + 1] +
                            rot[r][2] * rb[i * 3 + 2];
        worst_rot = std::max(worst_rot, std::abs(ro[i * 3 + r] - want));
      }
  }
  if (worst_rot >= 1e-5) {
    note = "rotation deviation " + fmt("%.2e", worst_rot);
    return false;
  }

  // Permutation: relabel atoms, outputs must follow the relabeling.
  const int n = mol.n();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  moldata::Molecule shuffled(n);
  for (int i = 0; i < n; ++i) {
    shuffled.set_atom(perm[i], mol.atom(i));
    shuffled.set_charge(perm[i], mol.charge(i));
    shuffled.set_coord(perm[i], mol.coord(i));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      shuffled.set_bond(perm[i], perm[j], mol.bond(i, j));
  denoiser::DenoiserOutput pout =
      model.forward(moldata::to_onehot(shuffled, vocab), 17);
  double worst_perm = 0.0;
  auto bX = base.pX.data(), sX = pout.pX.data();
  auto bC = base.pC.data(), sC = pout.pC.data();
  auto bR = base.R_hat.data(), sR = pout.R_hat.data();
  auto bY = base.pY.data(), sY = pout.pY.data();
  const int nx = static_cast<int>(vocab.n_atom_types());
  const int nc = static_cast<int>(vocab.n_charge_types());
  const int ny = moldata::kBondTypes;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < nx; ++k)
      worst_perm = std::max(
          worst_perm, std::abs(bX[i * nx + k] - sX[perm[i] * nx + k]));
    for (int k = 0; k < nc; ++k)
      worst_perm = std::max(
          worst_perm, std::abs(bC[i * nc + k] - sC[perm[i] * nc + k]));
    for (int k = 0; k < 3; ++k)
      worst_perm = std::max(
          worst_perm, std::abs(bR[i * 3 + k] - sR[perm[i] * 3 + k]));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < ny; ++k)
        worst_perm = std::max(
            worst_perm,
            std::abs(bY[(i * n + j) * ny + k] -
                     sY[(perm[i] * n + perm[j]) * ny + k]));
  }
  if (worst_perm >= 1e-8) {
    note = "permutation deviation " + fmt("%.2e", worst_perm);
    return false;
  }

  // Zero CoM after every coordinate-writing sublayer...
  double worst_com = 0.0;
  model.coord_probe = [&](const std::string&, const numkit::Tensor& coords) {
    worst_com = std::max(worst_com, com_norm(coords, n));
  };
  (void)model.forward(base_graph, 17);
  model.coord_probe = nullptr;

  // ...and along a full reverse trajectory.
  moldata::DatasetSplit split = moldata::load_dataset(
      MIDI_ROOT "/assets/corpus.jsonl", moldata::FileFormat::Jsonl, vocab,
      moldata::SplitFractions{0.8, 0.1, 0.1}, 1);
  noise::TransitionSet transitions =
      noise::TransitionSet::from_marginals(split.marginals);
  noise::NoiseSchedule sch = noise::NoiseSchedule::build(100, 2.5, 1, 1, 1.5);
  sampling::DenoiserPredictor predictor(model);
  sampling::Sampler sampler(predictor, sch, transitions, vocab,
                            split.node_count_probs);
  sampler.state_probe = [&](int, const moldata::OneHotGraph& g) {
    worst_com = std::max(worst_com, com_norm(g.R, g.n()));
  };
  (void)sampler.sample(3, 2024);
  note = "rotation " + fmt("%.1e", worst_rot) + ", permutation " +
         fmt("%.1e", worst_perm) + ", CoM " + fmt("%.1e", worst_com);
  return worst_com < 1e-9;
}

// ---------------------------------------------------------------------------
// 5. Gradient check of the full training loss on a 4-atom molecule.
bool criterion5(std::string& note) {
  const auto start = Clock::now();
  moldata::Vocab vocab;
  // 4 atoms: ammonia (N + 3 H) read from the bundled corpus.
  std::vector<moldata::Molecule> corpus =
      moldata::read_jsonl(MIDI_ROOT "/assets/corpus.jsonl", vocab);
  const moldata::Molecule* pick = nullptr;
  for (const auto& mol : corpus)
    if (mol.n() == 4) {
      pick = &mol;
      break;
    }
  if (!pick) {
    note = "no 4-atom molecule in the bundled corpus";
    return false;
  }

  denoiser::DenoiserConfig cfg;
  cfg.n_layers = 2;
  cfg.node_dim = 16;
  cfg.edge_dim = 8;
  cfg.global_dim = 16;
  cfg.n_heads = 2;
  cfg.t_emb_dim = 8;
  cfg.pos_hidden = 8;
  cfg.max_timestep = 10;
  denoiser::Denoiser model(cfg, vocab.n_atom_types(), vocab.n_charge_types(),
                           moldata::kBondTypes, 55);

  moldata::OneHotGraph clean = moldata::to_onehot(*pick, vocab);
  moldata::DatasetSplit split = moldata::load_dataset(
      MIDI_ROOT "/assets/corpus.jsonl", moldata::FileFormat::Jsonl, vocab,
      moldata::SplitFractions{0.8, 0.1, 0.1}, 1);
  noise::TransitionSet transitions =
      noise::TransitionSet::from_marginals(split.marginals);
  noise::NoiseSchedule sch = noise::NoiseSchedule::build(10, 2.5, 1, 1, 1.5);
  numkit::Rng rng(numkit::derive_seed(5, 0xACC));
  moldata::OneHotGraph noisy = noise::corrupt(clean, sch, transitions, 4, rng);

  training::LossWeights weights;
  auto f = [&]() {
    return training::diffusion_loss(model.forward(noisy, 4), clean, weights)
        .total;
  };
  std::vector<numkit::Tensor> leaves;
  size_t n_params = 0;
  for (const auto& [name, tensor] : model.params().entries()) {
    leaves.push_back(tensor);
    n_params += tensor.numel();
  }
  const double worst = numkit::grad_check(f, leaves, 1e-5, 1e-5);
  const double elapsed = seconds_since(start);
  note = "max rel err " + fmt("%.2e", worst) + " over " +
         std::to_string(n_params) + " parameters, " + fmt("%.1f s", elapsed);
  return worst < 1e-3 && elapsed < 60.0;
}

// ---------------------------------------------------------------------------
// 6. Train the bundled configuration and grade 100 samples.
bool criterion6(std::string& note) {
  const auto start = Clock::now();
  const fs::path dir = fs::temp_directory_path() / "midi_acceptance6";
  fs::remove_all(dir);
  fs::create_directories(dir);

  cli::RunConfig cfg = cli::RunConfig::load(MIDI_ROOT "/configs/adaptive.cfg");
  cfg.dataset_path = MIDI_ROOT "/assets/corpus.jsonl";
  cfg.valency_table_path = MIDI_ROOT "/assets/valency.json";
  cfg.bond_table_path = MIDI_ROOT "/assets/bond_lengths.json";
  cfg.checkpoint_path = (dir / "model.ckpt").string();
  cfg.train_log_path = (dir / "log.csv").string();
  cfg.sample_out = (dir / "samples.jsonl").string();
  const fs::path cfg_path = dir / "run.cfg";
  {
    std::ofstream f(cfg_path);
    f << "seed = " << cfg.seed << "\n"
      << "dataset.path = " << cfg.dataset_path << "\n"
      << "train.steps = " << cfg.train_steps << "\n"
      << "train.checkpoint = " << cfg.checkpoint_path << "\n"
      << "train.log = " << cfg.train_log_path << "\n"
      << "sample.out = " << cfg.sample_out << "\n"
      << "paths.valency_table = " << cfg.valency_table_path << "\n"
      << "paths.bond_table = " << cfg.bond_table_path << "\n"
      << "schedule.nu_r = " << cfg.nu_r << "\n"
      << "schedule.nu_y = " << cfg.nu_y << "\n";
  }

  std::ostringstream out, err;
  cli::TrainOptions topt;
  topt.config_path = cfg_path.string();
  if (cli::cmd_train(topt, out, err) != cli::kExitOk) {
    note = "training failed: " + err.str();
    return false;
  }
  const double train_time = seconds_since(start);
  if (train_time > 1800.0) {
    note = "training exceeded 30 minutes: " + fmt("%.0f s", train_time);
    return false;
  }

  cli::SampleOptions sopt;
  sopt.config_path = cfg_path.string();
  sopt.count = 100;
  sopt.seed_set = true;
  sopt.seed = 7;
  sopt.out_path = (dir / "samples.jsonl").string();
  std::ostringstream sout, serr;
  if (cli::cmd_sample(sopt, sout, serr) != cli::kExitOk) {
    note = "sampling failed: " + serr.str();
    return false;
  }

  moldata::Vocab vocab;
  std::vector<moldata::Molecule> samples =
      moldata::read_jsonl(sopt.out_path, vocab);
  if (samples.size() != 100) {
    note = "expected 100 samples, got " + std::to_string(samples.size());
    return false;
  }
  moldata::ValencyTable table =
      moldata::ValencyTable::from_json_file(MIDI_ROOT "/assets/valency.json");
  int stable_atoms = 0, total_atoms = 0, connected = 0;
  for (const auto& mol : samples) {
    metrics::StabilityCounts sc = metrics::stability(mol, vocab, table);
    stable_atoms += sc.stable_atoms;
    total_atoms += sc.n_atoms;
    connected += moldata::connected_components(mol) == 1 ? 1 : 0;
  }
  const double atom_pct = 100.0 * stable_atoms / std::max(total_atoms, 1);
  const double conn_pct = 100.0 * connected / 100.0;
  fs::remove_all(dir);
  note = "atom stability " + fmt("%.1f%%", atom_pct) + ", connected " +
         fmt("%.0f%%", conn_pct) + ", train " + fmt("%.0f s", train_time) +
         ", total " + fmt("%.0f s", seconds_since(start));
  return atom_pct >= 70.0 && conn_pct >= 60.0;
}

// ---------------------------------------------------------------------------
// 7. Metrics self-consistency on the bundled corpus.
bool criterion7(std::string& note) {
  moldata::Vocab vocab;
  std::vector<moldata::Molecule> corpus =
      moldata::read_jsonl(MIDI_ROOT "/assets/corpus.jsonl", vocab);
  moldata::DatasetSplit split;
  split.vocab = vocab;
  split.train = corpus;
  split.test = corpus;
  split.marginals = moldata::compute_marginals(corpus, vocab);
  split.node_count_probs = moldata::node_count_histogram(corpus);
  moldata::ValencyTable table =
      moldata::ValencyTable::from_json_file(MIDI_ROOT "/assets/valency.json");

  metrics::MetricsReport rep = metrics::evaluate(corpus, split, table, nullptr);
  const double dist_max =
      std::max({rep.atom_tv, rep.bond_tv, rep.valency_w1, rep.bond_lengths_w1,
                rep.bond_angles_w1});
  if (dist_max >= 1e-12) {
    note = "self-evaluation distance " + fmt("%.2e", dist_max);
    return false;
  }

  int stable_mols = 0;
  for (const auto& mol : corpus)
    stable_mols += metrics::stability(mol, vocab, table).molecule_stable;
  const double direct = 100.0 * stable_mols / corpus.size();
  if (rep.mol_stable_pct != direct) {
    note = "stability mismatch: report " + fmt("%.6f", rep.mol_stable_pct) +
           " vs direct " + fmt("%.6f", direct);
    return false;
  }

  metrics::Histogram1D d0({0.0}, {1.0});
  metrics::Histogram1D d1({1.0}, {1.0});
  metrics::Histogram1D split01({0.0, 2.0}, {0.5, 0.5});
  if (metrics::w1_distance(d0, d1) != 1.0 ||
      metrics::w1_distance(d0, split01) != 1.0) {
    note = "W1 hand case not exact";
    return false;
  }
  note = "self distances " + fmt("%.1e", dist_max) + ", stability " +
         fmt("%.2f%%", direct) + ", hand cases exact";
  return true;
}

// ---------------------------------------------------------------------------
// 8. Distance-based bond prediction degrades under coordinate noise.
bool criterion8(std::string& note) {
  moldata::Vocab vocab;
  std::vector<moldata::Molecule> corpus =
      moldata::read_jsonl(MIDI_ROOT "/assets/corpus.jsonl", vocab);
  sampling::BondLookupTable table = sampling::BondLookupTable::from_json_file(
      MIDI_ROOT "/assets/bond_lengths.json");
  numkit::Rng rng(numkit::derive_seed(8, 0xACC));
  int clean = 0, noisy = 0;
  for (const auto& mol : corpus) {
    if (bonds_match(mol, sampling::predict_bonds_by_distance(mol, vocab, table)))
      ++clean;
    moldata::Molecule shaken = perturbed(mol, 0.15, rng);
    if (bonds_match(mol,
                    sampling::predict_bonds_by_distance(shaken, vocab, table)))
      ++noisy;
  }
  note = "clean recovery " + std::to_string(clean) + "/" +
         std::to_string(corpus.size()) + ", perturbed " +
         std::to_string(noisy) + "/" + std::to_string(corpus.size());
  return noisy < clean &&
         noisy < static_cast<int>(corpus.size());
}

// ---------------------------------------------------------------------------
// 9. Whole-pipeline determinism through the command layer.
bool criterion9(std::string& note) {
  const fs::path dir = fs::temp_directory_path() / "midi_acceptance9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "run.cfg";
  {
    std::ofstream f(cfg_path);
    f << "seed = 11\n"
      << "dataset.path = " MIDI_ROOT "/assets/overfit16.jsonl\n"
      << "dataset.train_frac = 1.0\n"
      << "dataset.val_frac = 0.0\n"
      << "dataset.test_frac = 0.0\n"
      << "schedule.T = 8\n"
      << "model.layers = 2\n"
      << "model.node_dim = 16\n"
      << "model.edge_dim = 8\n"
      << "model.global_dim = 16\n"
      << "model.heads = 2\n"
      << "model.t_emb_dim = 8\n"
      << "model.pos_hidden = 8\n"
      << "train.steps = 100\n"
      << "train.batch_size = 2\n"
      << "train.log_every = 1\n"
      << "train.checkpoint = " << (dir / "model.ckpt").string() << "\n"
      << "train.log = " << (dir / "log.csv").string() << "\n"
      << "sample.out = " << (dir / "samples.jsonl").string() << "\n";
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  cli::TrainOptions topt;
  topt.config_path = cfg_path.string();
  std::ostringstream sink, esink;
  if (cli::cmd_train(topt, sink, esink) != cli::kExitOk) {
    note = "first training run failed";
    return false;
  }
  const std::string log1 = slurp(dir / "log.csv");
  if (cli::cmd_train(topt, sink, esink) != cli::kExitOk) {
    note = "second training run failed";
    return false;
  }
  const std::string log2 = slurp(dir / "log.csv");
  if (log1 != log2) {
    note = "training logs differ between identically seeded runs";
    return false;
  }

  cli::SampleOptions sopt;
  sopt.config_path = cfg_path.string();
  sopt.count = 4;
  sopt.seed_set = true;
  sopt.seed = 33;
  sopt.out_path = (dir / "samples.jsonl").string();
  if (cli::cmd_sample(sopt, sink, esink) != cli::kExitOk) {
    note = "first sampling run failed";
    return false;
  }
  const std::string gen1 = slurp(dir / "samples.jsonl");
  if (cli::cmd_sample(sopt, sink, esink) != cli::kExitOk) {
    note = "second sampling run failed";
    return false;
  }
  const std::string gen2 = slurp(dir / "samples.jsonl");
  fs::remove_all(dir);
  if (gen1 != gen2) {
    note = "sampled JSONL differs between identically seeded runs";
    return false;
  }
  const size_t lines =
      static_cast<size_t>(std::count(gen1.begin(), gen1.end(), '\n'));
  note = "100-step logs identical (" + std::to_string(log1.size()) +
         " bytes), sample files identical (" + std::to_string(lines) +
         " records)";
  return lines == 4;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> all = {
      {1, "discrete posterior matches enumeration", criterion1},
      {2, "gaussian posterior: exact final step, Monte-Carlo moments",
       criterion2},
      {3, "schedule monotone, variance-preserving, product-consistent",
       criterion3},
      {4, "denoiser equivariance and zero-CoM trajectories", criterion4},
      {5, "full-loss gradients match finite differences", criterion5},
      {6, "trained model reaches stability and connectivity bars", criterion6},
      {7, "metrics self-consistency and exact hand cases", criterion7},
      {8, "distance-derived bonds degrade under coordinate noise", criterion8},
      {9, "training and sampling are byte-deterministic", criterion9},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    std::string note;
    bool ok = false;
    try {
      ok = c.fn(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("%s  %d  %s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                note.empty() ? "" : " — ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
