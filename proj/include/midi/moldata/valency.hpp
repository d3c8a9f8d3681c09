// SPDX-License-Identifier: Apache-2.0
//
// Allowed total bond orders per (atom type, formal charge). Shipped as an
// editable JSON config: {"C": {"0": [4], "1": [3]}, ...} with charges as
// string keys and valencies as numbers (aromatic bonds contribute 1.5, so
// half-integral entries are legal).

#ifndef MIDI_MOLDATA_VALENCY_HPP
#define MIDI_MOLDATA_VALENCY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace midi::moldata {

class ValencyTable {
 public:
  // Standard organic-chemistry valencies for H/C/N/O/F with common ions.
  static ValencyTable defaults();
  static ValencyTable from_json_file(const std::string& path);

  void set(const std::string& symbol, int charge,
           std::vector<double> allowed);

  // nullptr when the (type, charge) pair has no entry.
  const std::vector<double>* allowed(const std::string& symbol,
                                     int charge) const;
  std::optional<double> max_allowed(const std::string& symbol,
                                    int charge) const;

  bool is_allowed(const std::string& symbol, int charge,
                  double valency) const;

 private:
  std::map<std::pair<std::string, int>, std::vector<double>> table_;
};

}  // namespace midi::moldata

#endif
