#include "oglasso/data_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace oglasso {

namespace {

void remap_labels(RawLibsvmFile& file) {
  std::map<double, int> seen;
  for (const auto& row : file.rows) ++seen[row.label];
  if (seen.empty()) return;

  const bool already = seen.size() <= 2 && seen.count(-1.0) + seen.count(1.0) == seen.size();
  if (already) return;

  if (seen.size() > 2)
    throw std::runtime_error("dataset has more than two distinct labels");

  const bool zero_one = seen.size() == 2 && seen.count(0.0) && seen.count(1.0);
  const double lo = seen.begin()->first;
  if (!zero_one) {
    std::ostringstream msg;
    msg << "labels {" << seen.begin()->first;
    if (seen.size() == 2) msg << ", " << seen.rbegin()->first;
    msg << "} remapped to {-1,+1} (smaller label -> -1)";
    file.warnings.push_back(msg.str());
  }
  for (auto& row : file.rows) row.label = row.label == lo ? -1.0 : 1.0;
}

}  // namespace

RawLibsvmFile parse_libsvm(std::istream& in) {
  RawLibsvmFile file;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    double label;
    if (!(ls >> label)) continue;  // blank or comment-only line

    LibsvmRow row;
    row.label = label;
    std::string tok;
    int prev_index = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected idx:val, got '" + tok + "'", lineno);
      size_t pos = 0;
      int idx = 0;
      double val = 0.0;
      try {
        idx = std::stoi(tok.substr(0, colon), &pos);
        if (pos != colon) throw std::invalid_argument("");
        val = std::stod(tok.substr(colon + 1), &pos);
        if (pos != tok.size() - colon - 1) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("malformed token '" + tok + "'", lineno);
      }
      if (idx < 1) throw ParseError("feature index must be >= 1", lineno);
      if (idx <= prev_index)
        throw ParseError("feature indices must be strictly increasing", lineno);
      if (!std::isfinite(val))
        throw ParseError("non-finite feature value", lineno);
      prev_index = idx;
      row.entries.emplace_back(idx, val);
      file.max_index = std::max(file.max_index, idx);
    }
    file.rows.push_back(std::move(row));
  }
  remap_labels(file);
  return file;
}

RawLibsvmFile load_libsvm(const std::string& path) {
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (!gz) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_libsvm(in);
  }
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string text;
  char buf[1 << 16];
  int got;
  while ((got = gzread(f, buf, sizeof buf)) > 0) text.append(buf, got);
  const bool ok = got == 0;
  gzclose(f);
  if (!ok) throw std::runtime_error("gzip read error on " + path);
  std::istringstream in(text);
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const RawLibsvmFile& file) {
  out.precision(17);
  for (const auto& row : file.rows) {
    out << row.label;
    for (const auto& [idx, val] : row.entries) out << ' ' << idx << ':' << val;
    out << '\n';
  }
}

ScaleMode scale_mode_from_string(const std::string& name) {
  if (name == "none") return ScaleMode::none;
  if (name == "maxabs") return ScaleMode::maxabs;
  if (name == "standardize") return ScaleMode::standardize;
  throw std::invalid_argument("unknown scale mode '" + name + "'");
}

std::string to_string(ScaleMode m) {
  switch (m) {
    case ScaleMode::none: return "none";
    case ScaleMode::maxabs: return "maxabs";
    case ScaleMode::standardize: return "standardize";
  }
  return "none";
}

Dataset make_dataset(const RawLibsvmFile& file, ScaleMode mode, int n_override) {
  if (file.rows.empty()) throw std::runtime_error("dataset has no rows");
  const int n = n_override > 0 ? n_override : file.max_index;
  if (n < file.max_index)
    throw std::runtime_error("n_override smaller than largest feature index");
  const int N = static_cast<int>(file.rows.size());

  Dataset ds;
  ds.labels.resize(N);
  for (int i = 0; i < N; ++i) ds.labels[i] = file.rows[i].label;

  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < N; ++i)
    for (const auto& [idx, val] : file.rows[i].entries)
      if (val != 0.0) trips.emplace_back(i, idx - 1, val);

  if (mode == ScaleMode::standardize) {
    if (static_cast<long long>(N) * n > 10'000'000)
      throw std::runtime_error("standardize would densify a dataset with > 1e7 entries");
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(N, n);
    for (const auto& t : trips) dense(t.row(), t.col()) = t.value();
    for (int c = 0; c < n; ++c) {
      const double mean = dense.col(c).mean();
      dense.col(c).array() -= mean;
      const double var = dense.col(c).squaredNorm() / N;
      if (var > 0.0) dense.col(c) /= std::sqrt(var);
    }
    trips.clear();
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < n; ++c)
        if (dense(i, c) != 0.0) trips.emplace_back(i, c, dense(i, c));
  } else if (mode == ScaleMode::maxabs) {
    std::vector<double> colmax(n, 0.0);
    for (const auto& t : trips)
      colmax[t.col()] = std::max(colmax[t.col()], std::abs(t.value()));
    for (auto& t : trips)
      if (colmax[t.col()] > 0.0)
        t = {t.row(), t.col(), t.value() / colmax[t.col()]};
  }

  ds.features.resize(N, n);
  ds.features.setFromTriplets(trips.begin(), trips.end());
  ds.features.makeCompressed();
  return ds;
}

}  // namespace oglasso
