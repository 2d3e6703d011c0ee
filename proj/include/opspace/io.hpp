// Copyright 2026 The opspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPSPACE_IO_HPP
#define OPSPACE_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace opspace {

inline constexpr const char* kArtifactName = "opspace";
inline constexpr const char* kArtifactVersion = "0.1.0";

namespace io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits: enough to round-trip any double, and fixed so that
/// identical runs produce byte-identical files.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Cell {
  std::string text;
  Cell(double v) : text(format_double(v)) {}          // NOLINT
  Cell(int v) : text(std::to_string(v)) {}            // NOLINT
  Cell(long long v) : text(std::to_string(v)) {}      // NOLINT
  Cell(size_t v) : text(std::to_string(v)) {}         // NOLINT
  Cell(const char* v) : text(v) {}                    // NOLINT
  Cell(std::string v) : text(std::move(v)) {}         // NOLINT
};

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    write_line(std::vector<Cell>(header.begin(), header.end()));
  }

  void row(std::initializer_list<Cell> cells) { write_line(std::vector<Cell>(cells)); }
  void row(const std::vector<Cell>& cells) { write_line(cells); }

 private:
  void write_line(const std::vector<Cell>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i].text;
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed");
  }

  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

/// Numeric gates in force across the library, echoed into every manifest.
inline nlohmann::json tolerance_manifest() {
  return nlohmann::json{{"zero_entry_rel", 1e-10},
                        {"selection_rule_gate_rel", 1e-8},
                        {"evolve_cross_check_rel", 1e-8},
                        {"eigenvalue_cluster_rel", 1e-8},
                        {"defective_overlap_abs", 1e-6},
                        {"csv_significant_digits", 17}};
}

}  // namespace io
}  // namespace opspace

#endif  // OPSPACE_IO_HPP
