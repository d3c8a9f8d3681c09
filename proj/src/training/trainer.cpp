// SPDX-License-Identifier: Apache-2.0

#include "midi/training/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "midi/numkit/ops.hpp"

namespace midi::training {

using namespace midi::numkit;

Trainer::Trainer(denoiser::Denoiser& model,
                 const noise::NoiseSchedule& schedule,
                 const noise::TransitionSet& transitions,
                 std::vector<moldata::OneHotGraph> train,
                 std::vector<moldata::OneHotGraph> val,
                 const TrainSettings& settings)
    : model_(&model),
      schedule_(&schedule),
      transitions_(&transitions),
      train_(std::move(train)),
      val_(std::move(val)),
      settings_(settings),
      adam_(model.params(), settings.adam),
      rng_(settings.seed) {
  if (train_.empty()) throw std::invalid_argument("training set is empty");
  if (settings_.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (schedule_->T > model.config().max_timestep) {
    throw std::invalid_argument(
        "schedule has more steps than the model accepts");
  }
}

namespace {

std::string format_row(int64_t step, const char* phase,
                       const LossBreakdown& lb, double total) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%lld,%s,%.10g,%.10g,%.10g,%.10g,%.10g",
                static_cast<long long>(step), phase, total, lb.coord, lb.atom,
                lb.charge, lb.bond);
  return buf;
}

std::string divergence_dump(int64_t step, int mol_index, int t,
                            const LossBreakdown& lb, double total) {
  std::ostringstream os;
  os << "non-finite loss during training\n"
     << "step: " << step << "\n"
     << "molecule_index: " << mol_index << "\n"
     << "timestep: " << t << "\n"
     << "total: " << total << "\n"
     << "coord: " << lb.coord << "\n"
     << "atom: " << lb.atom << "\n"
     << "charge: " << lb.charge << "\n"
     << "bond: " << lb.bond << "\n";
  return os.str();
}

}  // namespace

LossBreakdown Trainer::batch_loss(bool update) {
  const int B = settings_.batch_size;
  LossBreakdown acc;
  double total = 0.0;
  for (int b = 0; b < B; ++b) {
    const int idx = static_cast<int>(rng_.uniform_int(train_.size()));
    const int t = 1 + static_cast<int>(rng_.uniform_int(
                          static_cast<uint64_t>(schedule_->T)));
    const moldata::OneHotGraph& clean = train_[static_cast<size_t>(idx)];
    moldata::OneHotGraph noisy =
        noise::corrupt(clean, *schedule_, *transitions_, t, rng_);
    auto out = model_->forward(noisy, t);
    LossBreakdown lb = diffusion_loss(out, clean, settings_.weights);
    const double item = lb.total.item();
    if (!std::isfinite(item)) {
      throw DivergenceError(
          "loss became non-finite at step " + std::to_string(global_step_),
          divergence_dump(global_step_, idx, t, lb, item));
    }
    if (update) backward(lb.total * (1.0 / B));
    acc.coord += lb.coord / B;
    acc.atom += lb.atom / B;
    acc.charge += lb.charge / B;
    acc.bond += lb.bond / B;
    total += item / B;
  }
  acc.total = Tensor::scalar(total);
  if (update) adam_.step();
  return acc;
}

LossBreakdown Trainer::train_step() {
  LossBreakdown lb = batch_loss(/*update=*/true);
  ++global_step_;
  return lb;
}

LossBreakdown Trainer::validation_loss() {
  NoGradGuard ng;
  Rng vrng(derive_seed(settings_.seed, /*stream=*/0x76616cu,
                       static_cast<uint64_t>(global_step_)));
  LossBreakdown acc;
  double total = 0.0;
  const size_t count = val_.size();
  if (count == 0) {
    acc.total = Tensor::scalar(0.0);
    return acc;
  }
  for (const auto& clean : val_) {
    const int t = 1 + static_cast<int>(vrng.uniform_int(
                          static_cast<uint64_t>(schedule_->T)));
    moldata::OneHotGraph noisy =
        noise::corrupt(clean, *schedule_, *transitions_, t, vrng);
    auto out = model_->forward(noisy, t);
    LossBreakdown lb = diffusion_loss(out, clean, settings_.weights);
    acc.coord += lb.coord / double(count);
    acc.atom += lb.atom / double(count);
    acc.charge += lb.charge / double(count);
    acc.bond += lb.bond / double(count);
    total += lb.total.item() / double(count);
  }
  acc.total = Tensor::scalar(total);
  return acc;
}

const char* Trainer::csv_header() {
  return "step,phase,total,coord,atom,charge,bond";
}

void Trainer::run(int steps, std::ostream* csv) {
  for (int s = 0; s < steps; ++s) {
    LossBreakdown lb = train_step();
    const bool log = settings_.log_every > 0 &&
                     (global_step_ % settings_.log_every == 0 || s == 0 ||
                      s + 1 == steps);
    if (csv && log) {
      *csv << format_row(global_step_, "train", lb, lb.total.item()) << "\n";
    }
    if (csv && settings_.val_every > 0 && !val_.empty() &&
        global_step_ % settings_.val_every == 0) {
      LossBreakdown vb = validation_loss();
      *csv << format_row(global_step_, "val", vb, vb.total.item()) << "\n";
    }
  }
  if (csv) csv->flush();
}

}  // namespace midi::training
