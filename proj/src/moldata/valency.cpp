// SPDX-License-Identifier: Apache-2.0

#include "midi/moldata/valency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace midi::moldata {

ValencyTable ValencyTable::defaults() {
  ValencyTable t;
  t.set("H", 0, {1});
  t.set("H", 1, {0});
  t.set("H", -1, {0});
  t.set("C", 0, {4});
  t.set("C", 1, {3});
  t.set("C", -1, {3});
  t.set("N", 0, {3});
  t.set("N", 1, {4});
  t.set("N", -1, {2});
  t.set("O", 0, {2});
  t.set("O", 1, {3});
  t.set("O", -1, {1});
  t.set("F", 0, {1});
  t.set("F", -1, {0});
  return t;
}

ValencyTable ValencyTable::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open valency table " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::runtime_error("valency table " + path + ": " + e.what());
  }
  ValencyTable t;
  for (const auto& [symbol, charges] : doc.items()) {
    for (const auto& [charge_key, vals] : charges.items()) {
      int charge = std::stoi(charge_key);
      std::vector<double> allowed;
      for (const auto& v : vals) allowed.push_back(v.get<double>());
      t.set(symbol, charge, std::move(allowed));
    }
  }
  return t;
}

void ValencyTable::set(const std::string& symbol, int charge,
                       std::vector<double> allowed) {
  std::sort(allowed.begin(), allowed.end());
  table_[{symbol, charge}] = std::move(allowed);
}

const std::vector<double>* ValencyTable::allowed(const std::string& symbol,
                                                 int charge) const {
  auto it = table_.find({symbol, charge});
  return it == table_.end() ? nullptr : &it->second;
}

std::optional<double> ValencyTable::max_allowed(const std::string& symbol,
                                                int charge) const {
  const std::vector<double>* a = allowed(symbol, charge);
  if (!a || a->empty()) return std::nullopt;
  return a->back();
}

bool ValencyTable::is_allowed(const std::string& symbol, int charge,
                              double valency) const {
  const std::vector<double>* a = allowed(symbol, charge);
  if (!a) return false;
  for (double v : *a)
    if (std::abs(v - valency) < 1e-9) return true;
  return false;
}

}  // namespace midi::moldata
