// SPDX-License-Identifier: Apache-2.0
//
// Permutation-invariant molecular graph digest via Weisfeiler-Leman color
// refinement over (atom type, charge, multiset of (bond type, neighbor
// color)). Coordinates are excluded. WL is an imperfect isomorphism proxy:
// rare collisions between non-isomorphic graphs are accepted.

#ifndef MIDI_MOLDATA_HASH_HPP
#define MIDI_MOLDATA_HASH_HPP

#include <cstdint>
#include <string>

#include "midi/moldata/molecule.hpp"

namespace midi::moldata {

struct Digest128 {
  uint64_t hi = 0;
  uint64_t lo = 0;
  auto operator<=>(const Digest128&) const = default;
  std::string hex() const;
};

struct Digest128Hash {
  size_t operator()(const Digest128& d) const {
    return static_cast<size_t>(d.hi ^ (d.lo * 0x9e3779b97f4a7c15ULL));
  }
};

Digest128 canonical_hash(const Molecule& mol);

}  // namespace midi::moldata

#endif
