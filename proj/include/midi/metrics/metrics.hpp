// SPDX-License-Identifier: Apache-2.0
//
// Evaluation of a generated molecule set against a reference dataset:
// valency-based stability/validity, graph-hash uniqueness/novelty,
// connectivity, categorical TV distances, and weighted Wasserstein
// distances over valency, bond-length, and bond-angle distributions.

#ifndef MIDI_METRICS_METRICS_HPP
#define MIDI_METRICS_METRICS_HPP

#include <string>
#include <vector>

#include "midi/metrics/histogram.hpp"
#include "midi/moldata/dataset.hpp"
#include "midi/moldata/molecule.hpp"
#include "midi/moldata/valency.hpp"

namespace midi::metrics {

struct StabilityCounts {
  int stable_atoms = 0;
  int n_atoms = 0;
  bool molecule_stable = false;
};

// An atom is stable iff its total bond order is one of the allowed
// valencies for its (type, charge); the molecule is stable iff every atom
// is. A (type, charge) pair absent from the table counts as unstable and
// appends a warning.
StabilityCounts stability(const moldata::Molecule& mol,
                          const moldata::Vocab& vocab,
                          const moldata::ValencyTable& table,
                          std::vector<std::string>* warnings = nullptr);

// True iff the molecule has at least one atom and every atom's total bond
// order is <= the maximum allowed for its (type, charge). No implicit
// hydrogens are added, and connectivity is not required.
bool validity(const moldata::Molecule& mol, const moldata::Vocab& vocab,
              const moldata::ValencyTable& table);

// Weighted Wasserstein distances; weights always come from the reference
// (training) side. Categories missing from the generated set contribute
// nothing and append a warning.
double valency_w1(const std::vector<moldata::Molecule>& gen,
                  const std::vector<moldata::Molecule>& ref,
                  const moldata::Vocab& vocab,
                  std::vector<std::string>* warnings = nullptr);

double bond_lengths_w1(const std::vector<moldata::Molecule>& gen,
                       const std::vector<moldata::Molecule>& ref,
                       std::vector<std::string>* warnings = nullptr);

double bond_angles_w1(const std::vector<moldata::Molecule>& gen,
                      const std::vector<moldata::Molecule>& ref,
                      const moldata::Vocab& vocab,
                      std::vector<std::string>* warnings = nullptr);

struct MetricsReport {
  double mol_stable_pct = 0.0;
  double atom_stable_pct = 0.0;
  double validity_pct = 0.0;
  double uniqueness_pct = 0.0;
  double novelty_pct = 0.0;
  double connected_pct = 0.0;
  double atom_tv = 0.0;
  double bond_tv = 0.0;
  double valency_w1 = 0.0;
  double bond_lengths_w1 = 0.0;  // Angstrom
  double bond_angles_w1 = 0.0;   // degrees

  // Canonical JSON object with this fixed key order and %.10g values.
  std::string to_json() const;
  // Aligned two-column text table in the same order.
  std::string to_table() const;
  // The canonical key order, shared with the JSON schema check.
  static const std::vector<std::string>& field_names();
};

// Full report for a generated set. TV distances compare against the test
// split's marginals; W1 distances and their weights use the training split;
// novelty is measured against training-set hashes. Throws when `gen` is
// empty.
MetricsReport evaluate(const std::vector<moldata::Molecule>& gen,
                       const moldata::DatasetSplit& ref,
                       const moldata::ValencyTable& table,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace midi::metrics

#endif
