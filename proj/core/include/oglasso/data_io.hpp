#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oglasso/losses.hpp"

namespace oglasso {

struct LibsvmRow {
  double label = 0.0;
  std::vector<std::pair<int, double>> entries;  // 1-based, strictly increasing
};

struct RawLibsvmFile {
  std::vector<LibsvmRow> rows;
  int max_index = 0;
  std::vector<std::string> warnings;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parse LIBSVM text: "label idx:val idx:val ...". Blank lines are skipped
/// and '#' starts a comment. Labels are remapped to {-1,+1}: {0,1} maps 0 to
/// -1, any other pair maps the smaller label to -1 (with a warning).
/// Throws ParseError (with line number) on malformed tokens or non-increasing
/// indices within a row.
RawLibsvmFile parse_libsvm(std::istream& in);

/// Read a file, transparently inflating it when the path ends in ".gz".
RawLibsvmFile load_libsvm(const std::string& path);

void write_libsvm(std::ostream& out, const RawLibsvmFile& file);

enum class ScaleMode { none, maxabs, standardize };
ScaleMode scale_mode_from_string(const std::string& name);
std::string to_string(ScaleMode m);

/// Assemble the sparse dataset. maxabs divides each column by its largest
/// absolute value (zero columns untouched); standardize maps columns to mean
/// zero and unit variance and is rejected for datasets with more than 1e7
/// potential entries since it densifies. n_override > 0 fixes the dimension
/// instead of using the largest observed index.
Dataset make_dataset(const RawLibsvmFile& file, ScaleMode mode,
                     int n_override = 0);

}  // namespace oglasso
