// SPDX-License-Identifier: Apache-2.0
//
// Distance-based bond assignment: a lookup table mapping (atom pair, bond
// order) to a typical length and tolerance. Classification scans orders from
// highest to lowest and returns the first interval containing the distance;
// at construction, lower-order intervals are trimmed so interiors never
// overlap a higher order's range.

#ifndef MIDI_SAMPLING_BOND_LOOKUP_HPP
#define MIDI_SAMPLING_BOND_LOOKUP_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "midi/moldata/molecule.hpp"

namespace midi::sampling {

struct BondRange {
  double length = 0.0;  // Angstrom
  double tol = 0.0;
};

class BondLookupTable {
 public:
  // Single-bond entries for every pair of default-vocab elements, using
  // classic covalent radii sums with a +-0.1 A tolerance.
  static BondLookupTable covalent_defaults();

  // JSON array of {"atoms": ["C","C"], "order": 1|2|3|"ar",
  //                "length": 1.54, "tol": 0.1}.
  static BondLookupTable from_json_file(const std::string& path);

  void set(const std::string& a, const std::string& b, moldata::Bond order,
           double length, double tol);

  std::optional<BondRange> find(const std::string& a, const std::string& b,
                                moldata::Bond order) const;

  // Highest bond order whose interval contains the distance; None otherwise
  // or when the pair is absent entirely.
  moldata::Bond classify(const std::string& a, const std::string& b,
                         double distance) const;

  // Effective interval after overlap trimming (empty optional when the
  // entry is missing or fully shadowed by higher orders).
  std::optional<std::pair<double, double>> effective_interval(
      const std::string& a, const std::string& b, moldata::Bond order) const;

 private:
  using PairKey = std::pair<std::string, std::string>;  // sorted symbols
  static PairKey key(const std::string& a, const std::string& b);

  std::map<PairKey, std::map<moldata::Bond, BondRange>> entries_;
};

// Rebuilds the bond matrix of `mol` from coordinates alone; atom types,
// charges, and coordinates are copied unchanged.
moldata::Molecule predict_bonds_by_distance(const moldata::Molecule& mol,
                                            const moldata::Vocab& vocab,
                                            const BondLookupTable& table);

}  // namespace midi::sampling

#endif
