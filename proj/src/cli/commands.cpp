// SPDX-License-Identifier: Apache-2.0

#include "midi/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

#include "midi/cli/run_config.hpp"
#include "midi/metrics/metrics.hpp"
#include "midi/moldata/io.hpp"
#include "midi/noise/corrupt.hpp"
#include "midi/sampling/sampler.hpp"
#include "midi/training/checkpoint.hpp"

namespace midi::cli {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kInitStream = 0x696e6974;  // model parameter init

denoiser::Denoiser build_model(const RunConfig& cfg,
                               const moldata::Vocab& vocab, uint64_t seed) {
  return denoiser::Denoiser(cfg.denoiser_config(), vocab.n_atom_types(),
                            vocab.n_charge_types(), moldata::kBondTypes, seed);
}

std::vector<moldata::OneHotGraph> encode_all(
    const std::vector<moldata::Molecule>& mols, const moldata::Vocab& vocab) {
  std::vector<moldata::OneHotGraph> out;
  out.reserve(mols.size());
  for (const auto& mol : mols) out.push_back(moldata::to_onehot(mol, vocab));
  return out;
}

}  // namespace

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = RunConfig::load(opt.config_path);
    cfg.validate();
    if (opt.dry_run) {
      out << "configuration valid\n";
      return kExitOk;
    }

    moldata::DatasetSplit split = cfg.load_split();
    if (split.train.empty())
      throw ConfigError("dataset.path", "training split is empty");

    noise::NoiseSchedule schedule = cfg.schedule();
    noise::TransitionSet transitions =
        noise::TransitionSet::from_marginals(split.marginals);
    denoiser::Denoiser model = build_model(
        cfg, split.vocab, numkit::derive_seed(cfg.seed, kInitStream));
    training::Trainer trainer(model, schedule, transitions,
                              encode_all(split.train, split.vocab),
                              encode_all(split.val, split.vocab),
                              cfg.train_settings());

    if (!opt.resume_path.empty()) {
      training::Checkpoint ck = training::load_checkpoint(opt.resume_path);
      if (ck.config_text != cfg.canonical_text()) {
        err << "error: checkpoint " << opt.resume_path
            << " does not match this configuration\n";
        return kExitMismatch;
      }
      training::restore_checkpoint(ck, model.params(), &trainer.optimizer());
      trainer.set_global_step(ck.global_step);
      trainer.rng().load_state(ck.rng_state);
      out << "resumed from step " << ck.global_step << "\n";
    }

    std::ofstream csv(cfg.train_log_path);
    if (!csv)
      throw ConfigError("train.log", "cannot write " + cfg.train_log_path);
    csv << training::Trainer::csv_header() << "\n";
    try {
      trainer.run(cfg.train_steps, &csv);
    } catch (const training::DivergenceError& e) {
      err << "error: " << e.what() << "\n" << e.diagnostics();
      return kExitDiverged;
    }
    csv.close();

    training::Checkpoint ck = training::make_checkpoint(
        cfg.canonical_text(), model.params(), &trainer.optimizer(),
        trainer.rng().save_state(), trainer.global_step());
    training::save_checkpoint(cfg.checkpoint_path, ck);
    out << "trained to step " << trainer.global_step() << "; checkpoint "
        << cfg.checkpoint_path << "; log " << cfg.train_log_path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const training::CheckpointError& e) {
    err << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_sample(const SampleOptions& opt, std::ostream& out,
               std::ostream& err) {
  try {
    RunConfig cfg = RunConfig::load(opt.config_path);
    cfg.validate();
    const std::string ckpt_path =
        opt.checkpoint_path.empty() ? cfg.checkpoint_path : opt.checkpoint_path;
    const int count = opt.count >= 0 ? opt.count : cfg.sample_count;
    const uint64_t seed = opt.seed_set ? opt.seed : cfg.seed;
    const std::string out_path =
        opt.out_path.empty() ? cfg.sample_out : opt.out_path;

    if (!fs::exists(ckpt_path)) {
      err << "error: checkpoint not found: " << ckpt_path << "\n";
      return kExitConfig;
    }
    training::Checkpoint ck;
    try {
      ck = training::load_checkpoint(ckpt_path);
    } catch (const training::CheckpointError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    }
    if (ck.config_text != cfg.canonical_text()) {
      err << "error: checkpoint " << ckpt_path
          << " was trained under a different schedule/model configuration\n";
      return kExitMismatch;
    }

    moldata::DatasetSplit split = cfg.load_split();
    denoiser::Denoiser model = build_model(cfg, split.vocab, 0);
    try {
      training::restore_checkpoint(ck, model.params(), nullptr);
    } catch (const training::CheckpointError& e) {
      err << "error: " << e.what() << "\n";
      return kExitMismatch;
    }

    noise::NoiseSchedule schedule = cfg.schedule();
    noise::TransitionSet transitions =
        noise::TransitionSet::from_marginals(split.marginals);
    sampling::DenoiserPredictor predictor(model);
    sampling::Sampler sampler(predictor, schedule, transitions, split.vocab,
                              split.node_count_probs);
    std::vector<moldata::Molecule> mols = sampler.sample(count, seed);

    moldata::write_jsonl(out_path, mols, split.vocab);
    fs::path base(out_path);
    fs::path dir = base.parent_path();
    std::string stem = base.stem().string();
    for (size_t i = 0; i < mols.size(); ++i) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_%03zu.xyz", i);
      fs::path xyz = dir / (stem + suffix);
      moldata::write_xyz(xyz.string(), mols[i], split.vocab,
                         "sample " + std::to_string(i) + " seed " +
                             std::to_string(seed));
    }
    if (opt.baseline_bonds) {
      sampling::BondLookupTable table = cfg.bond_table();
      std::vector<moldata::Molecule> rederived;
      rederived.reserve(mols.size());
      for (const auto& mol : mols)
        rederived.push_back(
            sampling::predict_bonds_by_distance(mol, split.vocab, table));
      fs::path baseline = dir / (stem + "_baseline.jsonl");
      moldata::write_jsonl(baseline.string(), rederived, split.vocab);
      out << "distance-derived bonds written to " << baseline.string() << "\n";
    }
    out << "wrote " << mols.size() << " molecules to " << out_path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = RunConfig::load(opt.config_path);
    if (!opt.reference_path.empty()) cfg.dataset_path = opt.reference_path;
    cfg.validate();
    const std::string report_path =
        opt.report_path.empty() ? cfg.eval_report_path : opt.report_path;

    if (!fs::exists(opt.generated_path)) {
      err << "error: generated set not found: " << opt.generated_path << "\n";
      return kExitConfig;
    }
    moldata::Vocab vocab;
    std::vector<moldata::Molecule> gen;
    try {
      gen = moldata::read_jsonl(opt.generated_path, vocab);
    } catch (const std::exception& e) {
      err << "error: cannot parse " << opt.generated_path << ": " << e.what()
          << "\n";
      return kExitConfig;
    }
    if (gen.empty()) {
      err << "error: generated set " << opt.generated_path << " is empty\n";
      return kExitEmptySet;
    }

    // The whole reference file serves as both comparison marginal and
    // novelty base, so evaluating a set against itself reports zeros.
    std::vector<moldata::Molecule> ref =
        cfg.dataset_format == "xyz"
            ? moldata::read_extended_xyz(cfg.dataset_path, vocab)
            : moldata::read_jsonl(cfg.dataset_path, vocab);
    moldata::DatasetSplit split;
    split.vocab = vocab;
    split.train = ref;
    split.test = std::move(ref);
    split.marginals = moldata::compute_marginals(split.train, vocab);
    split.node_count_probs = moldata::node_count_histogram(split.train);
    moldata::ValencyTable table = cfg.valency_table();
    std::vector<std::string> warnings;
    metrics::MetricsReport report =
        metrics::evaluate(gen, split, table, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    out << report.to_table();

    std::ofstream jf(report_path);
    if (!jf) throw ConfigError("eval.report", "cannot write " + report_path);
    jf << report.to_json() << "\n";
    out << "report written to " << report_path << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_schedule_dump(const std::string& config_path, std::ostream& out,
                      std::ostream& err) {
  try {
    RunConfig cfg = RunConfig::load(config_path);
    cfg.validate(/*check_paths=*/false);
    noise::NoiseSchedule sch = cfg.schedule();
    out << "t,alpha_bar_r,alpha_bar_x,alpha_bar_c,alpha_bar_y\n";
    char row[160];
    for (int t = 0; t <= sch.T; ++t) {
      std::snprintf(row, sizeof(row), "%d,%.17g,%.17g,%.17g,%.17g\n", t,
                    sch.r.alpha_bar(t), sch.x.alpha_bar(t),
                    sch.c.alpha_bar(t), sch.y.alpha_bar(t));
      out << row;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace midi::cli
