// Copyright 2026 The FKWC Authors
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

#include "fkwc/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace fkwc {
namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor I/O assumes a little-endian host");

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                : comma - start));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
        !std::isfinite(v)) {
      throw ValidationError("non-numeric cell at line " + std::to_string(line_no));
    }
    row.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  out.write(bytes.data(), bytes.size());
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) return false;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return true;
}

}  // namespace

FunctionalSample load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> flat;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    auto row = parse_row(line, line_no);
    if (rows == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw ValidationError("ragged row at line " + std::to_string(line_no));
    }
    flat.insert(flat.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ValidationError("CSV contains no observations");
  if (width < 2) throw ValidationError("CSV needs at least 2 grid points per row");
  FunctionalSample s{Grid::line(width), Matrix(rows, width), {}};
  s.values.data() = std::move(flat);
  return s;
}

void save_csv(const FunctionalSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::array<char, 32> buf;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto row = sample.values.row(i);
    for (std::size_t p = 0; p < row.size(); ++p) {
      if (p) out << ',';
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), row[p]);
      out.write(buf.data(), res.ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

bool is_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8] = {};
  if (!in.read(magic, 8)) return false;
  return std::memcmp(magic, kTensorMagic, 8) == 0;
}

FunctionalSample load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8] = {};
  if (!in.read(magic, 8) || std::memcmp(magic, kTensorMagic, 8) != 0) {
    throw IoError("unrecognized format: " + path.string());
  }
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  if (!get_le(in, n) || !get_le(in, d)) throw IoError("truncated header: " + path.string());
  if (d == 0) throw IoError("tensor has zero dimensions");
  std::vector<std::size_t> sizes(d);
  for (auto& s : sizes) {
    std::uint32_t v = 0;
    if (!get_le(in, v)) throw IoError("truncated header: " + path.string());
    if (v < 2) throw IoError("tensor axis with fewer than 2 points");
    s = v;
  }
  Grid grid(std::move(sizes));
  FunctionalSample s{grid, Matrix(n, grid.total_points()), {}};
  auto& data = s.values.data();
  const auto bytes = static_cast<std::streamsize>(data.size() * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(data.data()), bytes)) {
    throw IoError("truncated payload: " + path.string());
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw ValidationError("tensor contains non-finite values");
  }
  return s;
}

void save_tensor(const FunctionalSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kTensorMagic, 8);
  put_le(out, static_cast<std::uint32_t>(sample.size()));
  put_le(out, static_cast<std::uint32_t>(sample.grid.dims()));
  for (std::size_t s : sample.grid.sizes()) put_le(out, static_cast<std::uint32_t>(s));
  const auto& data = sample.values.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw IoError("failed writing " + path.string());
}

FunctionalSample load_sample(const std::filesystem::path& path, bool csv_has_header) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  return is_tensor_file(path) ? load_tensor(path) : load_csv(path, csv_has_header);
}

}  // namespace fkwc
