// Copyright 2026 The combmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "combmem/comb_modes.hpp"
#include "combmem/errors.hpp"
#include "combmem/gaussian.hpp"
#include "combmem/memory_channel.hpp"
#include "combmem/metrics.hpp"

namespace combmem {

using Json = nlohmann::ordered_json;

inline Json to_json(const ModeVector& v) {
  Json re = Json::array(), im = Json::array();
  for (const auto& c : v.amplitudes()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"tooth_offset", v.tooth_offset()}, {"re", re}, {"im", im}};
}

inline ModeVector mode_vector_from_json(const Json& j) {
  try {
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw ConfigError("mode vector: 're' and 'im' lengths differ");
    std::vector<cplx> amps(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) amps[i] = {re[i], im[i]};
    return ModeVector(amps, j.value("tooth_offset", 0));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mode vector: ") + e.what());
  }
}

inline Json to_json(const ModeBasis& b) {
  Json arr = Json::array();
  for (const auto& v : b) arr.push_back(to_json(v));
  return arr;
}

inline ModeBasis mode_basis_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("mode basis: expected a nonempty array");
  std::vector<ModeVector> vs;
  for (const auto& item : j) vs.push_back(mode_vector_from_json(item));
  return ModeBasis(std::move(vs));
}

inline Json to_json(const CovarianceMatrix& c) {
  Json rows = Json::array();
  const auto& e = c.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < e.cols(); ++k) row.push_back(e(i, k));
    rows.push_back(row);
  }
  return {{"mode_count", c.mode_count()}, {"rows", rows}};
}

inline CovarianceMatrix covariance_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw DimensionError("covariance: matrix is not square");
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    CovarianceMatrix c(m);
    if (j.contains("mode_count") && j.at("mode_count").get<int>() != c.mode_count())
      throw DimensionError("covariance: mode_count disagrees with the matrix size");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("covariance: ") + e.what());
  }
}

inline Json to_json(const SupermodeReport& r) {
  return {{"mode_index", r.index},       {"zeta_in", r.zeta_in},
          {"zeta_in_dB", r.zeta_in_db()}, {"zeta_out", r.zeta_out},
          {"zeta_out_dB", r.zeta_out_db()}, {"purity", r.purity_out},
          {"fidelity", r.fidelity},       {"closed_form", r.closed_form}};
}

inline Json to_json(const KernelResponse& k) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < k.frequencies.size(); ++i)
    rows.push_back({{"omega_rad_s", k.frequencies[i]},
                    {"re_K", k.values[i].real()},
                    {"im_K", k.values[i].imag()},
                    {"absK2", std::norm(k.values[i])}});
  return {{"flatness", k.flatness}, {"samples", rows}};
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace combmem
