// SPDX-License-Identifier: Apache-2.0

#include "midi/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "midi/moldata/hash.hpp"

namespace midi::metrics {

namespace {

using moldata::Bond;
using moldata::Molecule;
using moldata::Vocab;

constexpr double kPi = 3.14159265358979323846;

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

double pair_distance(const Molecule& mol, int i, int j) {
  const auto& a = mol.coord(i);
  const auto& b = mol.coord(j);
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Distribution of atom-type indices over all atoms in the set.
Histogram1D atom_type_histogram(const std::vector<Molecule>& mols) {
  std::map<double, double> counts;
  for (const Molecule& mol : mols)
    for (int i = 0; i < mol.n(); ++i)
      counts[static_cast<double>(mol.atom(i))] += 1.0;
  return Histogram1D::from_counts(counts);
}

// Distribution of bond classes (including "none") over unordered pairs.
Histogram1D bond_class_histogram(const std::vector<Molecule>& mols) {
  std::map<double, double> counts;
  for (const Molecule& mol : mols)
    for (int i = 0; i < mol.n(); ++i)
      for (int j = i + 1; j < mol.n(); ++j)
        counts[static_cast<double>(static_cast<int>(mol.bond(i, j)))] += 1.0;
  return Histogram1D::from_counts(counts);
}

std::vector<int> bonded_neighbors(const Molecule& mol, int i) {
  std::vector<int> out;
  for (int j = 0; j < mol.n(); ++j)
    if (j != i && mol.bond(i, j) != Bond::None) out.push_back(j);
  return out;
}

// All bond angles (degrees) at type-x atoms with >= 2 neighbors, per type.
std::vector<std::vector<double>> angles_by_type(
    const std::vector<Molecule>& mols, int n_types) {
  std::vector<std::vector<double>> out(static_cast<size_t>(n_types));
  for (const Molecule& mol : mols)
    for (int i = 0; i < mol.n(); ++i) {
      std::vector<int> nb = bonded_neighbors(mol, i);
      if (nb.size() < 2) continue;
      auto& bucket = out[static_cast<size_t>(mol.atom(i))];
      for (size_t a = 0; a < nb.size(); ++a)
        for (size_t b = a + 1; b < nb.size(); ++b) {
          const auto& ri = mol.coord(i);
          const auto& ra = mol.coord(nb[a]);
          const auto& rb = mol.coord(nb[b]);
          double u[3] = {ra[0] - ri[0], ra[1] - ri[1], ra[2] - ri[2]};
          double v[3] = {rb[0] - ri[0], rb[1] - ri[1], rb[2] - ri[2]};
          double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
          double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
          if (nu == 0.0 || nv == 0.0) continue;  // coincident atoms
          double c = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (nu * nv);
          c = std::clamp(c, -1.0, 1.0);
          bucket.push_back(std::acos(c) * 180.0 / kPi);
        }
    }
  return out;
}

// Counts of eligible (>= 2 neighbors) atoms per type.
std::vector<double> eligible_counts(const std::vector<Molecule>& mols,
                                    int n_types) {
  std::vector<double> out(static_cast<size_t>(n_types), 0.0);
  for (const Molecule& mol : mols)
    for (int i = 0; i < mol.n(); ++i)
      if (bonded_neighbors(mol, i).size() >= 2)
        out[static_cast<size_t>(mol.atom(i))] += 1.0;
  return out;
}

}  // namespace

StabilityCounts stability(const Molecule& mol, const Vocab& vocab,
                          const moldata::ValencyTable& table,
                          std::vector<std::string>* warnings) {
  StabilityCounts out;
  out.n_atoms = mol.n();
  for (int i = 0; i < mol.n(); ++i) {
    const std::string& symbol =
        vocab.atom_symbols[static_cast<size_t>(mol.atom(i))];
    int charge = mol.charge(i);
    if (table.allowed(symbol, charge) == nullptr) {
      warn(warnings, "stability: no valency entry for " + symbol +
                         " with charge " + std::to_string(charge) +
                         "; atom counted unstable");
      continue;
    }
    if (table.is_allowed(symbol, charge, moldata::atom_valency(mol, i)))
      ++out.stable_atoms;
  }
  out.molecule_stable = (out.stable_atoms == out.n_atoms) && out.n_atoms > 0;
  return out;
}

bool validity(const Molecule& mol, const Vocab& vocab,
              const moldata::ValencyTable& table) {
  if (mol.n() < 1) return false;
  for (int i = 0; i < mol.n(); ++i) {
    const std::string& symbol =
        vocab.atom_symbols[static_cast<size_t>(mol.atom(i))];
    std::optional<double> max = table.max_allowed(symbol, mol.charge(i));
    if (!max.has_value()) return false;
    if (moldata::atom_valency(mol, i) > *max + 1e-9) return false;
  }
  return true;
}

double valency_w1(const std::vector<Molecule>& gen,
                  const std::vector<Molecule>& ref, const Vocab& vocab,
                  std::vector<std::string>* warnings) {
  if (gen.empty() || ref.empty())
    throw std::invalid_argument("valency_w1 needs two non-empty sets");
  const int a = vocab.n_atom_types();
  std::vector<std::map<double, double>> gen_counts(static_cast<size_t>(a)),
      ref_counts(static_cast<size_t>(a));
  std::vector<double> type_count(static_cast<size_t>(a), 0.0);
  double total_atoms = 0.0;
  for (const Molecule& mol : ref)
    for (int i = 0; i < mol.n(); ++i) {
      auto t = static_cast<size_t>(mol.atom(i));
      ref_counts[t][moldata::atom_valency(mol, i)] += 1.0;
      type_count[t] += 1.0;
      total_atoms += 1.0;
    }
  for (const Molecule& mol : gen)
    for (int i = 0; i < mol.n(); ++i)
      gen_counts[static_cast<size_t>(mol.atom(i))]
                [moldata::atom_valency(mol, i)] += 1.0;

  double sum = 0.0;
  for (int x = 0; x < a; ++x) {
    double p = type_count[static_cast<size_t>(x)] / total_atoms;
    if (p == 0.0) continue;
    Histogram1D gh = Histogram1D::from_counts(gen_counts[static_cast<size_t>(x)]);
    if (gh.empty()) {
      warn(warnings, "valency_w1: atom type " +
                         vocab.atom_symbols[static_cast<size_t>(x)] +
                         " absent from generated set; term skipped");
      continue;
    }
    sum += p * w1_distance(
                   gh, Histogram1D::from_counts(ref_counts[static_cast<size_t>(x)]));
  }
  return sum;
}

double bond_lengths_w1(const std::vector<Molecule>& gen,
                       const std::vector<Molecule>& ref,
                       std::vector<std::string>* warnings) {
  constexpr double kBin = 0.01;  // Angstrom
  constexpr int kOrders = moldata::kBondTypes - 1;
  auto collect = [](const std::vector<Molecule>& mols) {
    std::vector<std::vector<double>> lengths(kOrders);
    for (const Molecule& mol : mols)
      for (int i = 0; i < mol.n(); ++i)
        for (int j = i + 1; j < mol.n(); ++j) {
          Bond b = mol.bond(i, j);
          if (b == Bond::None) continue;
          lengths[static_cast<size_t>(static_cast<int>(b) - 1)].push_back(
              pair_distance(mol, i, j));
        }
    return lengths;
  };
  std::vector<std::vector<double>> gen_len = collect(gen),
                                   ref_len = collect(ref);
  double ref_total = 0.0, gen_total = 0.0;
  for (int y = 0; y < kOrders; ++y) {
    ref_total += static_cast<double>(ref_len[static_cast<size_t>(y)].size());
    gen_total += static_cast<double>(gen_len[static_cast<size_t>(y)].size());
  }
  if (ref_total == 0.0 || gen_total == 0.0)
    throw std::invalid_argument("bond_lengths_w1 needs bonds on both sides");

  static const char* kOrderNames[] = {"single", "double", "triple",
                                      "aromatic"};
  double sum = 0.0;
  for (int y = 0; y < kOrders; ++y) {
    double p =
        static_cast<double>(ref_len[static_cast<size_t>(y)].size()) / ref_total;
    if (p == 0.0) continue;
    if (gen_len[static_cast<size_t>(y)].empty()) {
      warn(warnings, std::string("bond_lengths_w1: no ") + kOrderNames[y] +
                         " bonds in generated set; term skipped");
      continue;
    }
    sum += p * w1_distance(
                   Histogram1D::from_samples(gen_len[static_cast<size_t>(y)], kBin),
                   Histogram1D::from_samples(ref_len[static_cast<size_t>(y)], kBin));
  }
  return sum;
}

double bond_angles_w1(const std::vector<Molecule>& gen,
                      const std::vector<Molecule>& ref, const Vocab& vocab,
                      std::vector<std::string>* warnings) {
  constexpr double kBin = 1.0;  // degrees
  const int a = vocab.n_atom_types();
  std::vector<std::vector<double>> gen_angles = angles_by_type(gen, a),
                                   ref_angles = angles_by_type(ref, a);
  std::vector<double> counts = eligible_counts(ref, a);
  double ref_eligible = 0.0;
  for (double c : counts) ref_eligible += c;
  bool gen_eligible = false;
  for (const auto& v : gen_angles) gen_eligible |= !v.empty();
  if (ref_eligible == 0.0 || !gen_eligible)
    throw std::invalid_argument(
        "bond_angles_w1 needs atoms with >= 2 neighbors on both sides");

  double sum = 0.0;
  for (int x = 0; x < a; ++x) {
    double p = counts[static_cast<size_t>(x)] / ref_eligible;
    if (p == 0.0 || ref_angles[static_cast<size_t>(x)].empty()) continue;
    if (gen_angles[static_cast<size_t>(x)].empty()) {
      warn(warnings, "bond_angles_w1: no angles at " +
                         vocab.atom_symbols[static_cast<size_t>(x)] +
                         " atoms in generated set; term skipped");
      continue;
    }
    sum += p * w1_distance(
                   Histogram1D::from_samples(gen_angles[static_cast<size_t>(x)], kBin),
                   Histogram1D::from_samples(ref_angles[static_cast<size_t>(x)], kBin));
  }
  return sum;
}

const std::vector<std::string>& MetricsReport::field_names() {
  static const std::vector<std::string> names = {
      "mol_stable_pct", "atom_stable_pct", "validity_pct",
      "uniqueness_pct", "novelty_pct",     "connected_pct",
      "atom_tv",        "bond_tv",         "valency_w1",
      "bond_lengths_w1", "bond_angles_w1"};
  return names;
}

namespace {

std::vector<double> report_values(const MetricsReport& r) {
  return {r.mol_stable_pct, r.atom_stable_pct, r.validity_pct,
          r.uniqueness_pct, r.novelty_pct,     r.connected_pct,
          r.atom_tv,        r.bond_tv,         r.valency_w1,
          r.bond_lengths_w1, r.bond_angles_w1};
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string MetricsReport::to_json() const {
  const auto& names = field_names();
  std::vector<double> values = report_values(*this);
  std::string out = "{";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += "\"" + names[i] + "\": " + format_value(values[i]);
  }
  out += "}";
  return out;
}

std::string MetricsReport::to_table() const {
  const auto& names = field_names();
  std::vector<double> values = report_values(*this);
  size_t width = 0;
  for (const auto& n : names) width = std::max(width, n.size());
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    std::string value = format_value(values[i]);
    out += names[i];
    out.append(width - names[i].size() + 2, ' ');
    if (value.size() < 14) out.append(14 - value.size(), ' ');
    out += value;
    out += '\n';
  }
  return out;
}

MetricsReport evaluate(const std::vector<Molecule>& gen,
                       const moldata::DatasetSplit& ref,
                       const moldata::ValencyTable& table,
                       std::vector<std::string>* warnings) {
  if (gen.empty()) throw std::invalid_argument("generated set is empty");

  MetricsReport report;
  const double n = static_cast<double>(gen.size());

  int atoms_total = 0, atoms_stable = 0, mols_stable = 0, valid_count = 0,
      connected_count = 0;
  std::vector<bool> valid_flags(gen.size(), false);
  for (size_t i = 0; i < gen.size(); ++i) {
    StabilityCounts st = stability(gen[i], ref.vocab, table, warnings);
    atoms_total += st.n_atoms;
    atoms_stable += st.stable_atoms;
    if (st.molecule_stable) ++mols_stable;
    valid_flags[i] = validity(gen[i], ref.vocab, table);
    if (valid_flags[i]) ++valid_count;
    if (moldata::connected_components(gen[i]) == 1) ++connected_count;
  }
  report.mol_stable_pct = 100.0 * mols_stable / n;
  report.atom_stable_pct =
      atoms_total > 0 ? 100.0 * atoms_stable / atoms_total : 0.0;
  report.validity_pct = 100.0 * valid_count / n;
  report.connected_pct = 100.0 * connected_count / n;

  std::set<moldata::Digest128> distinct;
  for (size_t i = 0; i < gen.size(); ++i)
    if (valid_flags[i]) distinct.insert(moldata::canonical_hash(gen[i]));
  report.uniqueness_pct =
      valid_count > 0
          ? 100.0 * static_cast<double>(distinct.size()) / valid_count
          : 0.0;

  std::set<moldata::Digest128> train_hashes;
  for (const Molecule& mol : ref.train)
    train_hashes.insert(moldata::canonical_hash(mol));
  size_t novel = 0;
  for (const auto& h : distinct)
    if (!train_hashes.contains(h)) ++novel;
  report.novelty_pct =
      distinct.empty()
          ? 0.0
          : 100.0 * static_cast<double>(novel) / static_cast<double>(distinct.size());

  report.atom_tv =
      tv_distance(atom_type_histogram(gen), atom_type_histogram(ref.test));
  report.bond_tv =
      tv_distance(bond_class_histogram(gen), bond_class_histogram(ref.test));

  report.valency_w1 = valency_w1(gen, ref.train, ref.vocab, warnings);
  report.bond_lengths_w1 = bond_lengths_w1(gen, ref.train, warnings);
  report.bond_angles_w1 = bond_angles_w1(gen, ref.train, ref.vocab, warnings);
  return report;
}

}  // namespace midi::metrics
