// JSON round-trip for search instances.
//
// Schema version 1.  Doubles are serialized with shortest-faithful
// formatting, so write + read reproduces every cell and parameter bit for
// bit.  Young and penalty functions are stored as small descriptors (family
// plus parameters); the dual and the normalization scale are recomputed on
// load rather than stored, keeping the file canonical.
#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bumplab/search.hpp"
#include "json.hpp"

namespace bumplab {

// Thrown for malformed files and descriptors; the CLI maps it to exit 2.
// Messages name the offending field.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& require_field(const ordered_json& j,
                                         const std::string& key,
                                         const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(where + ": missing field '" + key + "'");
  return *it;
}

inline double require_number(const ordered_json& j, const std::string& key,
                             const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_number())
    throw IoError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline int require_int(const ordered_json& j, const std::string& key,
                       const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_number_integer())
    throw IoError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

inline std::string require_string(const ordered_json& j,
                                  const std::string& key,
                                  const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_string())
    throw IoError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline ordered_json young_to_json(const YoungFunction& A,
                                  const std::string& where) {
  ordered_json j;
  switch (A.family()) {
    case YoungFamily::power: j["family"] = "power"; break;
    case YoungFamily::log_bump: j["family"] = "log"; break;
    case YoungFamily::loglog_bump: j["family"] = "loglog"; break;
    case YoungFamily::tabulated:
      throw IoError(where + ": tabulated young functions have no file form");
  }
  j["p"] = A.p();
  if (A.family() != YoungFamily::power) j["eta"] = A.eta();
  return j;
}

inline YoungFunction young_from_json(const ordered_json& j,
                                     const std::string& where) {
  if (!j.is_object()) throw IoError(where + ": must be an object");
  const std::string family = require_string(j, "family", where);
  const double p = require_number(j, "p", where);
  try {
    if (family == "power") return YoungFunction::power(p);
    if (family == "log")
      return YoungFunction::log_bump(p, require_number(j, "eta", where));
    if (family == "loglog")
      return YoungFunction::loglog_bump(p, require_number(j, "eta", where));
  } catch (const std::invalid_argument& e) {
    throw IoError(where + ": " + e.what());
  }
  throw IoError(where + ": unknown family '" + family + "'");
}

inline ordered_json epsilon_to_json(const EpsilonFunction& eps,
                                    const std::string& where) {
  ordered_json j;
  switch (eps.family()) {
    case EpsilonFamily::power_law: j["family"] = "power"; break;
    case EpsilonFamily::log_power: j["family"] = "log"; break;
    case EpsilonFamily::triple_log: j["family"] = "triple"; break;
  }
  j["param"] = eps.param();
  if (!(eps.normalized_q() > 0.0))
    throw IoError(where + ": penalty must be normalized before writing");
  j["q"] = eps.normalized_q();
  return j;
}

inline EpsilonFunction epsilon_from_json(const ordered_json& j,
                                         const std::string& where) {
  if (!j.is_object()) throw IoError(where + ": must be an object");
  const std::string family = require_string(j, "family", where);
  const double param = require_number(j, "param", where);
  const double q = require_number(j, "q", where);
  try {
    EpsilonFunction raw = family == "power"
                              ? EpsilonFunction::power_law(param)
                          : family == "log" ? EpsilonFunction::log_power(param)
                          : family == "triple"
                              ? EpsilonFunction::triple_log(param)
                              : throw IoError(where + ": unknown family '" +
                                              family + "'");
    return raw.normalized(q);
  } catch (const std::invalid_argument& e) {
    throw IoError(where + ": " + e.what());
  }
}

inline std::vector<double> cells_from_json(const ordered_json& j,
                                           const std::string& key,
                                           std::size_t expected,
                                           const std::string& where) {
  const auto& arr = require_field(j, key, where);
  if (!arr.is_array())
    throw IoError(where + ": field '" + key + "' must be an array");
  if (arr.size() != expected)
    throw IoError(where + ": field '" + key + "' has " +
                  std::to_string(arr.size()) + " cells, expected " +
                  std::to_string(expected));
  std::vector<double> cells;
  cells.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw IoError(where + ": " + key + "[" + std::to_string(i) +
                    "] must be a number");
    cells.push_back(arr[i].get<double>());
  }
  return cells;
}

}  // namespace detail

inline std::string instance_to_json_string(const Instance& inst) {
  validate_instance(inst);
  detail::ordered_json j;
  j["version"] = 1;
  j["dimension"] = inst.grid->dimension();
  j["depth"] = inst.grid->depth();
  j["p"] = inst.p;
  j["seed"] = inst.seed;
  j["sigma"] = inst.sigma.cells();
  j["w"] = inst.w.cells();
  auto sparse = detail::ordered_json::array();
  for (const auto& q : inst.family)
    sparse.push_back({q.level, q.ix, q.iy});
  j["sparse"] = std::move(sparse);
  j["young_sigma"] = detail::young_to_json(inst.A, "young_sigma");
  j["young_w"] = detail::young_to_json(inst.B, "young_w");
  j["epsilon_sigma"] = detail::epsilon_to_json(inst.eps_p, "epsilon_sigma");
  j["epsilon_w"] = detail::epsilon_to_json(inst.eps_pc, "epsilon_w");
  return j.dump(2) + "\n";
}

inline Instance instance_from_json_string(const std::string& text,
                                          const std::string& where = "input") {
  detail::ordered_json j;
  try {
    j = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(where + ": " + e.what());
  }
  if (!j.is_object()) throw IoError(where + ": top level must be an object");
  const int version = detail::require_int(j, "version", where);
  if (version != 1)
    throw IoError(where + ": unsupported version " + std::to_string(version));

  const int d = detail::require_int(j, "dimension", where);
  const int L = detail::require_int(j, "depth", where);
  if (d < 1 || d > 2) throw IoError(where + ": dimension must be 1 or 2");
  if (L < 1 || L > 24) throw IoError(where + ": depth out of range");
  const double p = detail::require_number(j, "p", where);
  if (!(p > 1.0)) throw IoError(where + ": p must exceed 1");

  auto grid = std::make_shared<const DyadicGrid>(d, L);
  auto sigma_cells =
      detail::cells_from_json(j, "sigma", grid->cell_count(), where);
  auto w_cells = detail::cells_from_json(j, "w", grid->cell_count(), where);

  const auto& sparse = detail::require_field(j, "sparse", where);
  if (!sparse.is_array() || sparse.empty())
    throw IoError(where + ": field 'sparse' must be a nonempty array");
  std::vector<Cube> family;
  family.reserve(sparse.size());
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    const auto& trip = sparse[i];
    const std::string slot = where + ": sparse[" + std::to_string(i) + "]";
    if (!trip.is_array() || trip.size() != 3)
      throw IoError(slot + " must be a [level, ix, iy] triple");
    for (int k = 0; k < 3; ++k)
      if (!trip[k].is_number_integer() || trip[k].get<long long>() < 0)
        throw IoError(slot + " entries must be nonnegative integers");
    Cube q{trip[0].get<int>(), trip[1].get<std::uint32_t>(),
           trip[2].get<std::uint32_t>()};
    try {
      grid->requireCube(q);
    } catch (const std::exception& e) {
      throw IoError(slot + ": " + e.what());
    }
    family.push_back(q);
  }

  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      throw IoError(where + ": field 'seed' must be an integer");
    seed = j["seed"].get<std::uint64_t>();
  }

  try {
    Instance inst{grid,
                  Weight(*grid, std::move(sigma_cells)),
                  Weight(*grid, std::move(w_cells)),
                  std::move(family),
                  p,
                  detail::young_from_json(
                      detail::require_field(j, "young_sigma", where),
                      where + ": young_sigma"),
                  detail::young_from_json(
                      detail::require_field(j, "young_w", where),
                      where + ": young_w"),
                  detail::epsilon_from_json(
                      detail::require_field(j, "epsilon_sigma", where),
                      where + ": epsilon_sigma"),
                  detail::epsilon_from_json(
                      detail::require_field(j, "epsilon_w", where),
                      where + ": epsilon_w"),
                  seed};
    validate_instance(inst);
    return inst;
  } catch (const std::invalid_argument& e) {
    throw IoError(where + ": " + e.what());
  }
}

inline void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << instance_to_json_string(inst);
  if (!out) throw IoError(path + ": write failed");
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json_string(buf.str(), path);
}

}  // namespace bumplab
