// SPDX-License-Identifier: Apache-2.0

#include "midi/moldata/dataset.hpp"

#include <numeric>
#include <stdexcept>

#include "midi/moldata/io.hpp"
#include "midi/numkit/rng.hpp"

namespace midi::moldata {

namespace {

void smooth_normalize(std::vector<double>& counts) {
  double total = 0.0;
  for (double& c : counts) {
    c += 1e-6;
    total += c;
  }
  for (double& c : counts) c /= total;
}

}  // namespace

FileFormat format_from_name(const std::string& name) {
  if (name == "jsonl") return FileFormat::Jsonl;
  if (name == "xyz") return FileFormat::ExtendedXyz;
  throw std::invalid_argument("unknown dataset format \"" + name +
                              "\" (expected jsonl or xyz)");
}

Marginals compute_marginals(const std::vector<Molecule>& mols,
                            const Vocab& vocab) {
  Marginals m;
  m.x.assign(static_cast<size_t>(vocab.n_atom_types()), 0.0);
  m.c.assign(static_cast<size_t>(vocab.n_charge_types()), 0.0);
  m.y.assign(kBondTypes, 0.0);
  for (const Molecule& mol : mols) {
    for (int i = 0; i < mol.n(); ++i) {
      m.x[static_cast<size_t>(mol.atom(i))] += 1.0;
      int q = vocab.charge_index(mol.charge(i));
      if (q < 0)
        throw std::invalid_argument("charge outside configured alphabet");
      m.c[static_cast<size_t>(q)] += 1.0;
    }
    for (int i = 0; i < mol.n(); ++i)
      for (int j = i + 1; j < mol.n(); ++j)
        m.y[static_cast<size_t>(mol.bond(i, j))] += 1.0;
  }
  smooth_normalize(m.x);
  smooth_normalize(m.c);
  smooth_normalize(m.y);
  return m;
}

std::vector<double> node_count_histogram(const std::vector<Molecule>& mols) {
  int max_n = 0;
  for (const Molecule& m : mols) max_n = std::max(max_n, m.n());
  std::vector<double> h(static_cast<size_t>(max_n) + 1, 0.0);
  for (const Molecule& m : mols) h[static_cast<size_t>(m.n())] += 1.0;
  double total = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= total;
  return h;
}

DatasetSplit load_dataset(const std::string& path, FileFormat format,
                          const Vocab& vocab, SplitFractions fractions,
                          uint64_t seed) {
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      fractions.train + fractions.val + fractions.test > 1.0 + 1e-9)
    throw std::invalid_argument("split fractions must be nonnegative and sum <= 1");
  std::vector<Molecule> all = format == FileFormat::Jsonl
                                  ? read_jsonl(path, vocab)
                                  : read_extended_xyz(path, vocab);
  size_t n = all.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  numkit::Rng rng(seed);
  rng.shuffle(order);

  auto n_val = static_cast<size_t>(fractions.val * static_cast<double>(n));
  auto n_test = static_cast<size_t>(fractions.test * static_cast<double>(n));
  DatasetSplit split;
  split.vocab = vocab;
  for (size_t i = 0; i < n; ++i) {
    Molecule& m = all[order[i]];
    if (i < n_val)
      split.val.push_back(std::move(m));
    else if (i < n_val + n_test)
      split.test.push_back(std::move(m));
    else
      split.train.push_back(std::move(m));
  }
  if (split.train.empty())
    throw std::runtime_error("split left the training set empty");
  split.marginals = compute_marginals(split.train, vocab);
  split.node_count_probs = node_count_histogram(split.train);
  return split;
}

}  // namespace midi::moldata
