// SPDX-License-Identifier: Apache-2.0
//
// Dataset ingestion: load, deterministic split, and training-set category
// marginals used both by the discrete noise model and as metric weights.

#ifndef MIDI_MOLDATA_DATASET_HPP
#define MIDI_MOLDATA_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "midi/moldata/molecule.hpp"

namespace midi::moldata {

enum class FileFormat { Jsonl, ExtendedXyz };

FileFormat format_from_name(const std::string& name);  // "jsonl" | "xyz"

// Category marginals over the training set. Bond marginal y runs over all
// five classes including "none", counted once per unordered pair. Counts
// are smoothed by +1e-6 before normalizing so every class has strictly
// positive mass (the discrete posterior requires m > 0).
struct Marginals {
  std::vector<double> x;  // atom types
  std::vector<double> c;  // charges
  std::vector<double> y;  // bond classes
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  Vocab vocab;
  std::vector<Molecule> train, val, test;
  Marginals marginals;               // from train
  std::vector<double> node_count_probs;  // index = atom count, from train
};

Marginals compute_marginals(const std::vector<Molecule>& mols,
                            const Vocab& vocab);

std::vector<double> node_count_histogram(const std::vector<Molecule>& mols);

// Reads every record, then splits by a seeded shuffle: floor(val), floor(test)
// sizes, remainder to train. Same (path, seed, fractions) => same split.
DatasetSplit load_dataset(const std::string& path, FileFormat format,
                          const Vocab& vocab, SplitFractions fractions,
                          uint64_t seed);

}  // namespace midi::moldata

#endif
