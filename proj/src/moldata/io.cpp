// SPDX-License-Identifier: Apache-2.0

#include "midi/moldata/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace midi::moldata {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_line(const std::string& path, size_t line,
                            const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

Bond bond_from_json(const json& order) {
  if (order.is_string()) {
    if (order.get<std::string>() == "ar") return Bond::Aromatic;
    throw std::runtime_error("unknown bond order \"" +
                             order.get<std::string>() + "\"");
  }
  int v = order.get<int>();
  switch (v) {
    case 1: return Bond::Single;
    case 2: return Bond::Double;
    case 3: return Bond::Triple;
    default:
      throw std::runtime_error("unknown bond order " + std::to_string(v));
  }
}

json bond_to_json(Bond b) {
  switch (b) {
    case Bond::Single: return 1;
    case Bond::Double: return 2;
    case Bond::Triple: return 3;
    case Bond::Aromatic: return "ar";
    case Bond::None: break;
  }
  throw std::logic_error("cannot serialize a 'none' bond");
}

Molecule parse_record(const json& rec, const Vocab& vocab) {
  const json& atoms = rec.at("atoms");
  if (!atoms.is_array() || atoms.empty())
    throw std::runtime_error("record has no atoms");
  int n = static_cast<int>(atoms.size());
  Molecule mol(n);
  for (int i = 0; i < n; ++i) {
    const json& a = atoms[static_cast<size_t>(i)];
    std::string symbol = a.at("type").get<std::string>();
    int type = vocab.atom_index(symbol);
    if (type < 0)
      throw std::runtime_error("unknown atom symbol \"" + symbol + "\"");
    mol.set_atom(i, type);
    int charge = a.value("charge", 0);
    if (vocab.charge_index(charge) < 0)
      throw std::runtime_error("charge " + std::to_string(charge) +
                               " outside configured alphabet");
    mol.set_charge(i, charge);
    const json& xyz = a.at("xyz");
    if (!xyz.is_array() || xyz.size() != 3)
      throw std::runtime_error("xyz must have 3 components");
    mol.set_coord(i, {xyz[0].get<double>(), xyz[1].get<double>(),
                      xyz[2].get<double>()});
  }
  for (const json& b : rec.value("bonds", json::array())) {
    if (!b.is_array() || b.size() != 3)
      throw std::runtime_error("bond entry must be [i, j, order]");
    int i = b[0].get<int>();
    int j = b[1].get<int>();
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::runtime_error("bond index out of range");
    if (i == j) throw std::runtime_error("self-bond is not allowed");
    if (mol.bond(i, j) != Bond::None)
      throw std::runtime_error("duplicate bond between " + std::to_string(i) +
                               " and " + std::to_string(j));
    mol.set_bond(i, j, bond_from_json(b[2]));
  }
  mol.center();
  return mol;
}

}  // namespace

Molecule from_jsonl_line(const std::string& line, const Vocab& vocab) {
  return parse_record(json::parse(line), vocab);
}

std::string to_jsonl_line(const Molecule& mol, const Vocab& vocab) {
  ordered_json atoms = ordered_json::array();
  for (int i = 0; i < mol.n(); ++i) {
    ordered_json a;
    a["type"] = vocab.atom_symbols[static_cast<size_t>(mol.atom(i))];
    a["charge"] = mol.charge(i);
    a["xyz"] = {mol.coord(i)[0], mol.coord(i)[1], mol.coord(i)[2]};
    atoms.push_back(std::move(a));
  }
  ordered_json bonds = ordered_json::array();
  for (int i = 0; i < mol.n(); ++i)
    for (int j = i + 1; j < mol.n(); ++j)
      if (mol.bond(i, j) != Bond::None)
        bonds.push_back({i, j, bond_to_json(mol.bond(i, j))});
  ordered_json rec;
  rec["atoms"] = std::move(atoms);
  rec["bonds"] = std::move(bonds);
  return rec.dump();
}

std::vector<Molecule> read_jsonl(const std::string& path, const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Molecule> mols;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      mols.push_back(from_jsonl_line(line, vocab));
    } catch (const std::exception& e) {
      fail_line(path, line_no, e.what());
    }
  }
  if (mols.empty()) throw std::runtime_error(path + ": no molecules");
  return mols;
}

void write_jsonl(const std::string& path, const std::vector<Molecule>& mols,
                 const Vocab& vocab) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const Molecule& m : mols) out << to_jsonl_line(m, vocab) << '\n';
}

std::vector<Molecule> read_extended_xyz(const std::string& path,
                                        const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Molecule> mols;
  std::string line;
  size_t line_no = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
        return true;
    }
    if (required) fail_line(path, line_no, "unexpected end of file");
    return false;
  };
  while (next_line(false)) {
    int n = 0;
    try {
      n = std::stoi(line);
    } catch (...) {
      fail_line(path, line_no, "expected atom count, got \"" + line + "\"");
    }
    if (n <= 0) fail_line(path, line_no, "atom count must be positive");
    next_line(true);  // comment line, ignored
    Molecule mol(n);
    for (int i = 0; i < n; ++i) {
      next_line(true);
      std::istringstream is(line);
      std::string symbol;
      double x, y, z;
      if (!(is >> symbol >> x >> y >> z))
        fail_line(path, line_no, "malformed atom line \"" + line + "\"");
      int type = vocab.atom_index(symbol);
      if (type < 0)
        fail_line(path, line_no, "unknown atom symbol \"" + symbol + "\"");
      mol.set_atom(i, type);
      mol.set_coord(i, {x, y, z});
      int charge = 0;
      if (is >> charge) {
        if (vocab.charge_index(charge) < 0)
          fail_line(path, line_no,
                    "charge " + std::to_string(charge) + " outside alphabet");
        mol.set_charge(i, charge);
      }
    }
    next_line(true);
    if (line.find("BONDS") == std::string::npos)
      fail_line(path, line_no, "expected BONDS block, got \"" + line + "\"");
    std::streampos before = in.tellg();
    size_t before_no = line_no;
    while (next_line(false)) {
      std::istringstream is(line);
      int i, j;
      std::string order;
      if (!(is >> i >> j >> order)) {
        // next molecule's count line; rewind
        in.clear();
        in.seekg(before);
        line_no = before_no;
        break;
      }
      if (i < 1 || j < 1 || i > n || j > n)
        fail_line(path, line_no, "bond index out of range");
      Bond b;
      if (order == "ar") {
        b = Bond::Aromatic;
      } else if (order == "1") {
        b = Bond::Single;
      } else if (order == "2") {
        b = Bond::Double;
      } else if (order == "3") {
        b = Bond::Triple;
      } else {
        fail_line(path, line_no, "unknown bond order \"" + order + "\"");
      }
      if (i == j) fail_line(path, line_no, "self-bond is not allowed");
      mol.set_bond(i - 1, j - 1, b);
      before = in.tellg();
      before_no = line_no;
    }
    mol.center();
    mols.push_back(std::move(mol));
  }
  if (mols.empty()) throw std::runtime_error(path + ": no molecules");
  return mols;
}

void write_xyz(const std::string& path, const Molecule& mol,
               const Vocab& vocab, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << mol.n() << '\n' << comment << '\n';
  out.precision(8);
  out << std::fixed;
  for (int i = 0; i < mol.n(); ++i)
    out << vocab.atom_symbols[static_cast<size_t>(mol.atom(i))] << ' '
        << mol.coord(i)[0] << ' ' << mol.coord(i)[1] << ' ' << mol.coord(i)[2]
        << '\n';
}

}  // namespace midi::moldata
