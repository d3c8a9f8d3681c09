// SPDX-License-Identifier: Apache-2.0

#include "midi/cli/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace midi::cli {

namespace {

std::string trim(const std::string& s) {
  size_t first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  size_t last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

int64_t parse_i64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed")
    seed = parse_u64(key, value);
  else if (key == "dataset.path")
    dataset_path = value;
  else if (key == "dataset.format")
    dataset_format = value;
  else if (key == "dataset.split_seed")
    split_seed = parse_u64(key, value);
  else if (key == "dataset.train_frac")
    train_frac = parse_double(key, value);
  else if (key == "dataset.val_frac")
    val_frac = parse_double(key, value);
  else if (key == "dataset.test_frac")
    test_frac = parse_double(key, value);
  else if (key == "schedule.T")
    schedule_T = parse_int(key, value);
  else if (key == "schedule.s")
    schedule_s = parse_double(key, value);
  else if (key == "schedule.nu_r")
    nu_r = parse_double(key, value);
  else if (key == "schedule.nu_x")
    nu_x = parse_double(key, value);
  else if (key == "schedule.nu_c")
    nu_c = parse_double(key, value);
  else if (key == "schedule.nu_y")
    nu_y = parse_double(key, value);
  else if (key == "model.layers")
    model_layers = parse_int(key, value);
  else if (key == "model.node_dim")
    model_node_dim = parse_int(key, value);
  else if (key == "model.edge_dim")
    model_edge_dim = parse_int(key, value);
  else if (key == "model.global_dim")
    model_global_dim = parse_int(key, value);
  else if (key == "model.heads")
    model_heads = parse_int(key, value);
  else if (key == "model.t_emb_dim")
    model_t_emb_dim = parse_int(key, value);
  else if (key == "model.pos_hidden")
    model_pos_hidden = parse_int(key, value);
  else if (key == "loss.coord")
    loss.coord = parse_double(key, value);
  else if (key == "loss.atom")
    loss.atom = parse_double(key, value);
  else if (key == "loss.charge")
    loss.charge = parse_double(key, value);
  else if (key == "loss.bond")
    loss.bond = parse_double(key, value);
  else if (key == "optim.lr")
    optim.lr = parse_double(key, value);
  else if (key == "optim.beta1")
    optim.beta1 = parse_double(key, value);
  else if (key == "optim.beta2")
    optim.beta2 = parse_double(key, value);
  else if (key == "optim.eps")
    optim.eps = parse_double(key, value);
  else if (key == "optim.clip_norm")
    optim.clip_norm = parse_double(key, value);
  else if (key == "train.steps")
    train_steps = parse_i64(key, value);
  else if (key == "train.batch_size")
    batch_size = parse_int(key, value);
  else if (key == "train.log_every")
    log_every = parse_int(key, value);
  else if (key == "train.val_every")
    val_every = parse_int(key, value);
  else if (key == "train.checkpoint")
    checkpoint_path = value;
  else if (key == "train.log")
    train_log_path = value;
  else if (key == "sample.count")
    sample_count = parse_int(key, value);
  else if (key == "sample.out")
    sample_out = value;
  else if (key == "paths.valency_table")
    valency_table_path = value;
  else if (key == "paths.bond_table")
    bond_table_path = value;
  else if (key == "eval.report")
    eval_report_path = value;
  else
    throw ConfigError(key, "unknown key");
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value' on line " +
                                  std::to_string(line_no));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(line, "missing key on line " + std::to_string(line_no));
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg = from_text(buffer.str());
  if (const char* env = std::getenv("MIDI_SEED")) {
    std::string v = trim(env);
    if (!v.empty()) cfg.seed = parse_u64("seed", v);
  }
  return cfg;
}

void RunConfig::validate(bool check_paths) const {
  require(dataset_format == "jsonl" || dataset_format == "xyz",
          "dataset.format", "must be 'jsonl' or 'xyz'");
  require(train_frac > 0.0 && train_frac <= 1.0, "dataset.train_frac",
          "must be in (0, 1]");
  require(val_frac >= 0.0 && val_frac <= 1.0, "dataset.val_frac",
          "must be in [0, 1]");
  require(test_frac >= 0.0 && test_frac <= 1.0, "dataset.test_frac",
          "must be in [0, 1]");
  require(train_frac + val_frac + test_frac <= 1.0 + 1e-9,
          "dataset.train_frac", "split fractions must sum to at most 1");
  require(schedule_T >= 1, "schedule.T", "must be >= 1");
  require(schedule_s > 0.0, "schedule.s", "must be > 0");
  require(nu_r > 0.0, "schedule.nu_r", "must be > 0");
  require(nu_x > 0.0, "schedule.nu_x", "must be > 0");
  require(nu_c > 0.0, "schedule.nu_c", "must be > 0");
  require(nu_y > 0.0, "schedule.nu_y", "must be > 0");
  try {
    denoiser_config().validate();
  } catch (const std::exception& e) {
    throw ConfigError("model", e.what());
  }
  require(loss.coord >= 0.0 && loss.atom >= 0.0 && loss.charge >= 0.0 &&
              loss.bond >= 0.0,
          "loss", "weights must be >= 0");
  require(optim.lr > 0.0, "optim.lr", "must be > 0");
  require(optim.beta1 >= 0.0 && optim.beta1 < 1.0, "optim.beta1",
          "must be in [0, 1)");
  require(optim.beta2 >= 0.0 && optim.beta2 < 1.0, "optim.beta2",
          "must be in [0, 1)");
  require(optim.eps > 0.0, "optim.eps", "must be > 0");
  require(train_steps >= 0, "train.steps", "must be >= 0");
  require(batch_size >= 1, "train.batch_size", "must be >= 1");
  require(log_every >= 1, "train.log_every", "must be >= 1");
  require(val_every >= 0, "train.val_every", "must be >= 0");
  require(sample_count >= 0, "sample.count", "must be >= 0");

  if (check_paths) {
    require(std::filesystem::exists(dataset_path), "dataset.path",
            "file not found: " + dataset_path);
    if (!valency_table_path.empty())
      require(std::filesystem::exists(valency_table_path),
              "paths.valency_table", "file not found: " + valency_table_path);
    if (!bond_table_path.empty())
      require(std::filesystem::exists(bond_table_path), "paths.bond_table",
              "file not found: " + bond_table_path);
  }
}

denoiser::DenoiserConfig RunConfig::denoiser_config() const {
  denoiser::DenoiserConfig cfg;
  cfg.n_layers = model_layers;
  cfg.node_dim = model_node_dim;
  cfg.edge_dim = model_edge_dim;
  cfg.global_dim = model_global_dim;
  cfg.n_heads = model_heads;
  cfg.t_emb_dim = model_t_emb_dim;
  cfg.pos_hidden = model_pos_hidden;
  cfg.max_timestep = schedule_T;
  return cfg;
}

noise::NoiseSchedule RunConfig::schedule() const {
  return noise::NoiseSchedule::build(schedule_T, nu_r, nu_x, nu_c, nu_y,
                                     schedule_s);
}

training::TrainSettings RunConfig::train_settings() const {
  training::TrainSettings ts;
  ts.batch_size = batch_size;
  ts.log_every = log_every;
  ts.val_every = val_every;
  ts.seed = numkit::derive_seed(seed, 0x747261696eULL);  // training stream
  ts.weights = loss;
  ts.adam = optim;
  return ts;
}

moldata::DatasetSplit RunConfig::load_split() const {
  moldata::Vocab vocab;
  return moldata::load_dataset(dataset_path,
                               moldata::format_from_name(dataset_format),
                               vocab, {train_frac, val_frac, test_frac},
                               split_seed);
}

moldata::ValencyTable RunConfig::valency_table() const {
  if (valency_table_path.empty()) return moldata::ValencyTable::defaults();
  return moldata::ValencyTable::from_json_file(valency_table_path);
}

sampling::BondLookupTable RunConfig::bond_table() const {
  if (bond_table_path.empty())
    return sampling::BondLookupTable::covalent_defaults();
  return sampling::BondLookupTable::from_json_file(bond_table_path);
}

std::string RunConfig::canonical_text() const {
  std::string out;
  out += "dataset.path=" + dataset_path + "\n";
  out += "dataset.format=" + dataset_format + "\n";
  out += "dataset.split_seed=" + std::to_string(split_seed) + "\n";
  out += "dataset.train_frac=" + fmt(train_frac) + "\n";
  out += "dataset.val_frac=" + fmt(val_frac) + "\n";
  out += "dataset.test_frac=" + fmt(test_frac) + "\n";
  out += "schedule.T=" + std::to_string(schedule_T) + "\n";
  out += "schedule.s=" + fmt(schedule_s) + "\n";
  out += "schedule.nu_r=" + fmt(nu_r) + "\n";
  out += "schedule.nu_x=" + fmt(nu_x) + "\n";
  out += "schedule.nu_c=" + fmt(nu_c) + "\n";
  out += "schedule.nu_y=" + fmt(nu_y) + "\n";
  out += "model.layers=" + std::to_string(model_layers) + "\n";
  out += "model.node_dim=" + std::to_string(model_node_dim) + "\n";
  out += "model.edge_dim=" + std::to_string(model_edge_dim) + "\n";
  out += "model.global_dim=" + std::to_string(model_global_dim) + "\n";
  out += "model.heads=" + std::to_string(model_heads) + "\n";
  out += "model.t_emb_dim=" + std::to_string(model_t_emb_dim) + "\n";
  out += "model.pos_hidden=" + std::to_string(model_pos_hidden) + "\n";
  return out;
}

}  // namespace midi::cli
