// SPDX-License-Identifier: Apache-2.0

#include "midi/sampling/bond_lookup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace midi::sampling {

using moldata::Bond;

namespace {

// Chemical orders, highest first; classification scans in this order.
constexpr Bond kDescendingOrders[] = {Bond::Triple, Bond::Double,
                                      Bond::Aromatic, Bond::Single};

}  // namespace

BondLookupTable::PairKey BondLookupTable::key(const std::string& a,
                                              const std::string& b) {
  return a <= b ? PairKey{a, b} : PairKey{b, a};
}

BondLookupTable BondLookupTable::covalent_defaults() {
  // Classic single-bond covalent radii (Angstrom).
  const std::vector<std::pair<std::string, double>> radii = {
      {"H", 0.37}, {"C", 0.77}, {"N", 0.75}, {"O", 0.73}, {"F", 0.71}};
  BondLookupTable t;
  for (size_t i = 0; i < radii.size(); ++i) {
    for (size_t j = i; j < radii.size(); ++j) {
      t.set(radii[i].first, radii[j].first, Bond::Single,
            radii[i].second + radii[j].second, 0.1);
    }
  }
  return t;
}

BondLookupTable BondLookupTable::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open bond table " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.is_array()) {
    throw std::runtime_error(path + ": expected a JSON array of bond entries");
  }
  BondLookupTable t;
  for (const auto& entry : j) {
    const auto& atoms = entry.at("atoms");
    if (!atoms.is_array() || atoms.size() != 2) {
      throw std::runtime_error(path + ": \"atoms\" must name two elements");
    }
    Bond order;
    const auto& o = entry.at("order");
    if (o.is_string() && o.get<std::string>() == "ar") {
      order = Bond::Aromatic;
    } else if (o.is_number_integer()) {
      switch (o.get<int>()) {
        case 1: order = Bond::Single; break;
        case 2: order = Bond::Double; break;
        case 3: order = Bond::Triple; break;
        default:
          throw std::runtime_error(path + ": bond order must be 1, 2, 3, or \"ar\"");
      }
    } else {
      throw std::runtime_error(path + ": bond order must be 1, 2, 3, or \"ar\"");
    }
    t.set(atoms[0].get<std::string>(), atoms[1].get<std::string>(), order,
          entry.at("length").get<double>(), entry.at("tol").get<double>());
  }
  return t;
}

void BondLookupTable::set(const std::string& a, const std::string& b,
                          Bond order, double length, double tol) {
  if (order == Bond::None) {
    throw std::invalid_argument("cannot register a \"none\" bond range");
  }
  if (!(length > 0) || !(tol >= 0)) {
    throw std::invalid_argument("bond length must be positive, tolerance >= 0");
  }
  entries_[key(a, b)][order] = BondRange{length, tol};
}

std::optional<BondRange> BondLookupTable::find(const std::string& a,
                                               const std::string& b,
                                               Bond order) const {
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) return std::nullopt;
  auto jt = it->second.find(order);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::optional<std::pair<double, double>> BondLookupTable::effective_interval(
    const std::string& a, const std::string& b, Bond order) const {
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) return std::nullopt;
  // Sweep from the highest order down, trimming each interval's low edge to
  // the highest upper edge claimed so far. Interiors end up disjoint; a
  // shared endpoint resolves to the higher order in classify().
  double claimed_hi = -std::numeric_limits<double>::infinity();
  for (Bond o : kDescendingOrders) {
    auto jt = it->second.find(o);
    if (jt == it->second.end()) continue;
    double lo = jt->second.length - jt->second.tol;
    double hi = jt->second.length + jt->second.tol;
    double eff_lo = std::max(lo, claimed_hi);
    claimed_hi = std::max(claimed_hi, hi);
    if (o == order) {
      if (eff_lo > hi) return std::nullopt;  // fully shadowed
      return std::make_pair(eff_lo, hi);
    }
  }
  return std::nullopt;
}

Bond BondLookupTable::classify(const std::string& a, const std::string& b,
                               double distance) const {
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) return Bond::None;
  for (Bond o : kDescendingOrders) {
    auto jt = it->second.find(o);
    if (jt == it->second.end()) continue;
    if (std::abs(distance - jt->second.length) <= jt->second.tol) return o;
  }
  return Bond::None;
}

moldata::Molecule predict_bonds_by_distance(const moldata::Molecule& mol,
                                            const moldata::Vocab& vocab,
                                            const BondLookupTable& table) {
  moldata::Molecule out = mol;
  const int n = mol.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.set_bond(i, j, Bond::None);

  for (int i = 0; i < n; ++i) {
    const auto& ri = mol.coord(i);
    const std::string& si = vocab.atom_symbols[static_cast<size_t>(mol.atom(i))];
    for (int j = i + 1; j < n; ++j) {
      const auto& rj = mol.coord(j);
      const double d = std::sqrt((ri[0] - rj[0]) * (ri[0] - rj[0]) +
                                 (ri[1] - rj[1]) * (ri[1] - rj[1]) +
                                 (ri[2] - rj[2]) * (ri[2] - rj[2]));
      const std::string& sj =
          vocab.atom_symbols[static_cast<size_t>(mol.atom(j))];
      Bond b = table.classify(si, sj, d);
      if (b != Bond::None) out.set_bond(i, j, b);
    }
  }
  return out;
}

}  // namespace midi::sampling
