// SPDX-License-Identifier: Apache-2.0
//
// Molecule serialization. Two formats:
//  - JSON lines, one molecule per line:
//      {"atoms":[{"type":"C","charge":0,"xyz":[x,y,z]},...],
//       "bonds":[[i,j,order],...]}
//    with order in {1,2,3,"ar"} and each bond listed once with i<j.
//  - Extended XYZ: standard XYZ blocks (count line, comment line, one
//    "Symbol x y z [charge]" line per atom) followed by a "BONDS" block of
//    "i j order" lines with 1-based indices; multiple blocks per file.
//
// Readers center every molecule on ingestion and report errors with the
// offending line number.

#ifndef MIDI_MOLDATA_IO_HPP
#define MIDI_MOLDATA_IO_HPP

#include <string>
#include <vector>

#include "midi/moldata/molecule.hpp"

namespace midi::moldata {

std::vector<Molecule> read_jsonl(const std::string& path, const Vocab& vocab);
void write_jsonl(const std::string& path, const std::vector<Molecule>& mols,
                 const Vocab& vocab);

// One canonical JSONL record (no trailing newline).
std::string to_jsonl_line(const Molecule& mol, const Vocab& vocab);
Molecule from_jsonl_line(const std::string& line, const Vocab& vocab);

std::vector<Molecule> read_extended_xyz(const std::string& path,
                                        const Vocab& vocab);

// Plain XYZ dump for external viewers (no bond block).
void write_xyz(const std::string& path, const Molecule& mol,
               const Vocab& vocab, const std::string& comment = "");

}  // namespace midi::moldata

#endif
