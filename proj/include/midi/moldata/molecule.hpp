// SPDX-License-Identifier: Apache-2.0
//
// Molecule data model: categorical atoms/charges/bonds plus 3D coordinates,
// and the one-hot tensor view consumed by the diffusion model.

#ifndef MIDI_MOLDATA_MOLECULE_HPP
#define MIDI_MOLDATA_MOLECULE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "midi/numkit/tensor.hpp"

namespace midi::moldata {

enum class Bond : uint8_t { None = 0, Single, Double, Triple, Aromatic };

inline constexpr int kBondTypes = 5;  // including "none"

// Contribution of a bond to an atom's valency; aromatic counts 1.5.
double bond_order(Bond b);

// Category alphabets shared by dataset, model, and metrics. The bond
// alphabet is fixed; atoms and charges are configurable.
struct Vocab {
  std::vector<std::string> atom_symbols{"H", "C", "N", "O", "F"};
  std::vector<int> charge_values{-1, 0, 1, 2, 3};

  int atom_index(const std::string& symbol) const;  // -1 if unknown
  int charge_index(int charge) const;               // -1 if out of range
  int n_atom_types() const { return static_cast<int>(atom_symbols.size()); }
  int n_charge_types() const { return static_cast<int>(charge_values.size()); }
};

// Dense molecular graph. Atom entries index into a Vocab's atom alphabet;
// charges are stored as their actual integer values.
class Molecule {
 public:
  Molecule() = default;
  explicit Molecule(int n)
      : atoms_(static_cast<size_t>(n)),
        charges_(static_cast<size_t>(n), 0),
        coords_(static_cast<size_t>(n), {0, 0, 0}),
        bonds_(static_cast<size_t>(n) * static_cast<size_t>(n), Bond::None) {}

  int n() const { return static_cast<int>(atoms_.size()); }

  int atom(int i) const { return atoms_[static_cast<size_t>(i)]; }
  void set_atom(int i, int type) { atoms_[static_cast<size_t>(i)] = type; }

  int charge(int i) const { return charges_[static_cast<size_t>(i)]; }
  void set_charge(int i, int q) { charges_[static_cast<size_t>(i)] = q; }

  const std::array<double, 3>& coord(int i) const {
    return coords_[static_cast<size_t>(i)];
  }
  void set_coord(int i, const std::array<double, 3>& xyz) {
    coords_[static_cast<size_t>(i)] = xyz;
  }

  Bond bond(int i, int j) const {
    return bonds_[static_cast<size_t>(i) * static_cast<size_t>(n()) +
                  static_cast<size_t>(j)];
  }
  // Writes both (i,j) and (j,i); self-bonds are rejected.
  void set_bond(int i, int j, Bond b);

  // Mean of the coordinates (the origin of the zero-CoM subspace).
  std::array<double, 3> centroid() const;
  void center();

  bool operator==(const Molecule& other) const = default;

 private:
  std::vector<int> atoms_;
  std::vector<int> charges_;
  std::vector<std::array<double, 3>> coords_;
  std::vector<Bond> bonds_;  // row-major n*n, symmetric, diagonal None
};

// One-hot tensor view: X is n x a, C is n x c, Y is n x n x b (symmetric in
// the first two axes), R is n x 3.
struct OneHotGraph {
  numkit::Tensor X, C, Y, R;
  int n() const { return static_cast<int>(X.dim(0)); }
};

OneHotGraph to_onehot(const Molecule& mol, const Vocab& vocab);

// Decodes by per-row argmax with lowest-index tie-break; bond matrix is
// symmetrized by decoding the upper triangle.
Molecule from_onehot(const OneHotGraph& g, const Vocab& vocab);

// Connected components under "bond != none" adjacency (breadth-first).
int connected_components(const Molecule& mol);

// Sum of incident bond orders (aromatic = 1.5).
double atom_valency(const Molecule& mol, int i);

}  // namespace midi::moldata

#endif
