// SPDX-License-Identifier: Apache-2.0

#include "midi/moldata/molecule.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace midi::moldata {

using numkit::Tensor;

double bond_order(Bond b) {
  switch (b) {
    case Bond::None: return 0.0;
    case Bond::Single: return 1.0;
    case Bond::Double: return 2.0;
    case Bond::Triple: return 3.0;
    case Bond::Aromatic: return 1.5;
  }
  return 0.0;
}

int Vocab::atom_index(const std::string& symbol) const {
  for (size_t i = 0; i < atom_symbols.size(); ++i)
    if (atom_symbols[i] == symbol) return static_cast<int>(i);
  return -1;
}

int Vocab::charge_index(int charge) const {
  for (size_t i = 0; i < charge_values.size(); ++i)
    if (charge_values[i] == charge) return static_cast<int>(i);
  return -1;
}

void Molecule::set_bond(int i, int j, Bond b) {
  if (i == j) throw std::invalid_argument("self-bond is not allowed");
  auto nn = static_cast<size_t>(n());
  bonds_[static_cast<size_t>(i) * nn + static_cast<size_t>(j)] = b;
  bonds_[static_cast<size_t>(j) * nn + static_cast<size_t>(i)] = b;
}

std::array<double, 3> Molecule::centroid() const {
  std::array<double, 3> c{0, 0, 0};
  if (n() == 0) return c;
  for (const auto& r : coords_)
    for (int k = 0; k < 3; ++k) c[static_cast<size_t>(k)] += r[static_cast<size_t>(k)];
  for (int k = 0; k < 3; ++k) c[static_cast<size_t>(k)] /= n();
  return c;
}

void Molecule::center() {
  std::array<double, 3> c = centroid();
  for (auto& r : coords_)
    for (int k = 0; k < 3; ++k) r[static_cast<size_t>(k)] -= c[static_cast<size_t>(k)];
}

OneHotGraph to_onehot(const Molecule& mol, const Vocab& vocab) {
  int n = mol.n();
  int a = vocab.n_atom_types();
  int c = vocab.n_charge_types();
  std::vector<double> X(static_cast<size_t>(n) * a, 0.0);
  std::vector<double> C(static_cast<size_t>(n) * c, 0.0);
  std::vector<double> Y(static_cast<size_t>(n) * n * kBondTypes, 0.0);
  for (int i = 0; i < n; ++i) {
    int t = mol.atom(i);
    if (t < 0 || t >= a)
      throw std::invalid_argument("atom type id out of alphabet range");
    int q = vocab.charge_index(mol.charge(i));
    if (q < 0)
      throw std::invalid_argument("charge " + std::to_string(mol.charge(i)) +
                                  " outside configured charge alphabet");
    X[static_cast<size_t>(i) * a + t] = 1.0;
    C[static_cast<size_t>(i) * c + q] = 1.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int b = static_cast<int>(mol.bond(i, j));
      Y[(static_cast<size_t>(i) * n + j) * kBondTypes + b] = 1.0;
    }
  std::vector<double> R(static_cast<size_t>(n) * 3);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      R[static_cast<size_t>(i) * 3 + k] = mol.coord(i)[static_cast<size_t>(k)];
  return OneHotGraph{
      Tensor::from_data({n, a}, std::move(X)),
      Tensor::from_data({n, c}, std::move(C)),
      Tensor::from_data({n, n, kBondTypes}, std::move(Y)),
      Tensor::from_data({n, 3}, std::move(R)),
  };
}

namespace {

// Index of the largest entry; ties resolve to the lowest index.
int argmax_row(std::span<const double> data, int64_t offset, int width) {
  int best = 0;
  double best_v = data[static_cast<size_t>(offset)];
  for (int k = 1; k < width; ++k) {
    double v = data[static_cast<size_t>(offset + k)];
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

}  // namespace

Molecule from_onehot(const OneHotGraph& g, const Vocab& vocab) {
  int n = g.n();
  int a = vocab.n_atom_types();
  int c = vocab.n_charge_types();
  Molecule mol(n);
  for (int i = 0; i < n; ++i) {
    mol.set_atom(i, argmax_row(g.X.data(), static_cast<int64_t>(i) * a, a));
    int q = argmax_row(g.C.data(), static_cast<int64_t>(i) * c, c);
    mol.set_charge(i, vocab.charge_values[static_cast<size_t>(q)]);
    mol.set_coord(i, {g.R.data()[static_cast<size_t>(i) * 3],
                      g.R.data()[static_cast<size_t>(i) * 3 + 1],
                      g.R.data()[static_cast<size_t>(i) * 3 + 2]});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int64_t off = (static_cast<int64_t>(i) * n + j) * kBondTypes;
      mol.set_bond(i, j, static_cast<Bond>(argmax_row(g.Y.data(), off,
                                                      kBondTypes)));
    }
  return mol;
}

int connected_components(const Molecule& mol) {
  int n = mol.n();
  std::vector<bool> seen(static_cast<size_t>(n), false);
  int components = 0;
  for (int start = 0; start < n; ++start) {
    if (seen[static_cast<size_t>(start)]) continue;
    ++components;
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<size_t>(start)] = true;
    while (!frontier.empty()) {
      int i = frontier.front();
      frontier.pop();
      for (int j = 0; j < n; ++j)
        if (!seen[static_cast<size_t>(j)] && mol.bond(i, j) != Bond::None) {
          seen[static_cast<size_t>(j)] = true;
          frontier.push(j);
        }
    }
  }
  return components;
}

double atom_valency(const Molecule& mol, int i) {
  double total = 0.0;
  for (int j = 0; j < mol.n(); ++j)
    if (j != i) total += bond_order(mol.bond(i, j));
  return total;
}

}  // namespace midi::moldata
