// SPDX-License-Identifier: Apache-2.0

#include "midi/moldata/hash.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "midi/numkit/rng.hpp"

namespace midi::moldata {

namespace {

using numkit::mix64;

uint64_t combine(uint64_t h, uint64_t v) { return mix64(h ^ mix64(v)); }

}  // namespace

std::string Digest128::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Digest128 canonical_hash(const Molecule& mol) {
  int n = mol.n();
  std::vector<uint64_t> color(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    color[static_cast<size_t>(i)] =
        combine(combine(0x6d6f6c686173686bULL, static_cast<uint64_t>(mol.atom(i))),
                static_cast<uint64_t>(static_cast<int64_t>(mol.charge(i)) + 16));

  // n refinement rounds: enough for colors to stabilize on any n-node graph.
  std::vector<uint64_t> next(static_cast<size_t>(n));
  std::vector<uint64_t> neigh;
  for (int round = 0; round < n; ++round) {
    for (int i = 0; i < n; ++i) {
      neigh.clear();
      for (int j = 0; j < n; ++j) {
        Bond b = mol.bond(i, j);
        if (b != Bond::None)
          neigh.push_back(combine(static_cast<uint64_t>(b),
                                  color[static_cast<size_t>(j)]));
      }
      std::sort(neigh.begin(), neigh.end());
      uint64_t h = color[static_cast<size_t>(i)];
      for (uint64_t v : neigh) h = combine(h, v);
      next[static_cast<size_t>(i)] = h;
    }
    color.swap(next);
  }

  // Sorted final colors make the digest permutation-invariant.
  std::sort(color.begin(), color.end());
  Digest128 d{0x9368e53c2f6af274ULL ^ static_cast<uint64_t>(n),
              0x43f6a8885a308d31ULL + static_cast<uint64_t>(n)};
  for (uint64_t c : color) {
    d.hi = combine(d.hi, c);
    d.lo = combine(d.lo, ~c);
  }
  return d;
}

}  // namespace midi::moldata
