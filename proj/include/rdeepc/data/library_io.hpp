// Copyright 2026 The rollover-deepc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDEEPC_DATA_LIBRARY_IO_HPP_
#define RDEEPC_DATA_LIBRARY_IO_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rdeepc/data/library.hpp"

namespace rdeepc::data {

static_assert(std::endian::native == std::endian::little,
              "library files are little-endian; big-endian hosts are not supported");

inline constexpr char kLibraryMagic[8] = {'R', 'D', 'P', 'C', 'L', 'I', 'B', '1'};

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return to_hex(fnv1a64(bytes));
}

namespace detail {

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& M) {
  out.write(reinterpret_cast<const char*>(M.data()),
            static_cast<std::streamsize>(M.size() * sizeof(double)));
}

inline Eigen::MatrixXd read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  in.read(reinterpret_cast<char*>(M.data()), static_cast<std::streamsize>(M.size() * sizeof(double)));
  if (!in) throw std::runtime_error("library file truncated");
  return M;
}

}  // namespace detail

/// Layout: 8-byte magic, uint64 header length, JSON header, then Up, Uf, Yp, Yf
/// (and singular values if reduced) as column-major little-endian float64.
inline void write_library(std::ostream& out, const DataLibrary& lib,
                          const Eigen::VectorXd* singular_values = nullptr,
                          int source_columns = 0) {
  lib.validate();
  nlohmann::json h;
  h["format"] = "rdeepc-library";
  h["version"] = 1;
  h["m"] = lib.m;
  h["p"] = lib.p;
  h["t_ini"] = lib.t_ini;
  h["horizon"] = lib.horizon;
  h["columns"] = lib.columns();
  h["seed"] = lib.provenance.seed;
  h["source_hash"] = lib.provenance.source_hash;
  h["reduced"] = singular_values != nullptr;
  h["source_columns"] = singular_values ? source_columns : lib.columns();
  h["blocks"] = {"Up", "Uf", "Yp", "Yf"};
  const std::string header = h.dump();
  const std::uint64_t len = header.size();
  out.write(kLibraryMagic, sizeof(kLibraryMagic));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), static_cast<std::streamsize>(len));
  detail::write_matrix(out, lib.Up);
  detail::write_matrix(out, lib.Uf);
  detail::write_matrix(out, lib.Yp);
  detail::write_matrix(out, lib.Yf);
  if (singular_values) detail::write_matrix(out, *singular_values);
  if (!out) throw std::runtime_error("failed writing library");
}

struct LoadedLibrary {
  DataLibrary library;
  bool reduced = false;
  Eigen::VectorXd singular_values;
  int source_columns = 0;

  ReducedLibrary as_reduced() const {
    if (!reduced) throw std::logic_error("library file holds a full library");
    return {library, singular_values, source_columns};
  }
};

inline LoadedLibrary read_library(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kLibraryMagic)) {
    throw std::runtime_error("not a library file (bad magic)");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1u << 20)) throw std::runtime_error("library header length invalid");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("library header truncated");
  const nlohmann::json h = nlohmann::json::parse(header);
  if (h.at("format") != "rdeepc-library" || h.at("version") != 1) {
    throw std::runtime_error("unsupported library format");
  }
  LoadedLibrary out;
  DataLibrary& lib = out.library;
  lib.m = h.at("m");
  lib.p = h.at("p");
  lib.t_ini = h.at("t_ini");
  lib.horizon = h.at("horizon");
  const int K = h.at("columns");
  lib.provenance.seed = h.at("seed");
  lib.provenance.source_hash = h.at("source_hash");
  out.reduced = h.at("reduced");
  out.source_columns = h.at("source_columns");
  lib.Up = detail::read_matrix(in, lib.m * lib.t_ini, K);
  lib.Uf = detail::read_matrix(in, lib.m * lib.horizon, K);
  lib.Yp = detail::read_matrix(in, lib.p * lib.t_ini, K);
  lib.Yf = detail::read_matrix(in, lib.p * lib.horizon, K);
  if (out.reduced) out.singular_values = detail::read_matrix(in, K, 1);
  lib.validate();
  return out;
}

inline void save_library(const std::string& path, const DataLibrary& lib) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_library(out, lib);
}

inline void save_library(const std::string& path, const ReducedLibrary& lib) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_library(out, lib.blocks, &lib.singular_values, lib.source_columns);
}

inline LoadedLibrary load_library(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_library(in);
}

}  // namespace rdeepc::data

#endif  // RDEEPC_DATA_LIBRARY_IO_HPP_
