#ifndef GABPFIX_MATRIX_MARKET_HPP
#define GABPFIX_MATRIX_MARKET_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gabpfix/least_squares.hpp"
#include "gabpfix/sparse_sym_matrix.hpp"

namespace gabpfix {

/// Shortest round-trip text form of a double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace detail {

struct MtxHeader {
  bool symmetric = false;
  std::size_t rows = 0, cols = 0, nnz = 0;
};

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline MtxHeader read_mtx_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream", 0);
  line_no = 1;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", line_no);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate")
    throw ParseError("only 'matrix coordinate' files are supported", line_no);
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("unsupported field '" + field + "'", line_no);
  MtxHeader h;
  if (symmetry == "symmetric")
    h.symmetric = true;
  else if (symmetry != "general")
    throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);

  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> h.rows >> h.cols >> h.nnz)) throw ParseError("bad size line", line_no);
    return h;
  }
  throw ParseError("missing size line", line_no);
}

template <typename Fn>
void read_mtx_entries(std::istream& in, const MtxHeader& h, std::size_t& line_no, Fn&& emit) {
  std::string line;
  std::size_t seen = 0;
  while (seen < h.nnz && std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::istringstream es(line);
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(es >> r >> c >> v)) throw ParseError("bad entry line", line_no);
    if (r < 1 || c < 1 || r > h.rows || c > h.cols)
      throw ParseError("index out of range", line_no);
    emit(r - 1, c - 1, v, line_no);
    ++seen;
  }
  if (seen != h.nnz) throw ParseError("expected " + std::to_string(h.nnz) + " entries, found " +
                                          std::to_string(seen), line_no);
}

}  // namespace detail

/// Reads `matrix coordinate real symmetric` (either triangle, 1-based).
inline SparseSymMatrix read_symmetric_matrix(std::istream& in) {
  std::size_t line_no = 0;
  const auto h = detail::read_mtx_header(in, line_no);
  if (!h.symmetric) throw ParseError("expected a symmetric matrix", 1);
  if (h.rows != h.cols) throw ParseError("symmetric matrix must be square", line_no);
  std::vector<SparseSymMatrix::Entry> entries;
  entries.reserve(h.nnz);
  detail::read_mtx_entries(in, h, line_no, [&](std::size_t r, std::size_t c, double v, std::size_t) {
    entries.push_back({r, c, v});
  });
  try {
    return SparseSymMatrix::from_entries(h.rows, entries);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
}

/// Reads `matrix coordinate real general` as a rectangular matrix.
inline RectMatrix read_general_matrix(std::istream& in) {
  std::size_t line_no = 0;
  const auto h = detail::read_mtx_header(in, line_no);
  std::vector<RectMatrix::Entry> entries;
  detail::read_mtx_entries(in, h, line_no, [&](std::size_t r, std::size_t c, double v, std::size_t) {
    entries.push_back({r, c, v});
    if (h.symmetric && r != c) entries.push_back({c, r, v});
  });
  try {
    return RectMatrix(h.rows, h.cols, std::move(entries));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
}

inline void write_symmetric_matrix(std::ostream& out, const SparseSymMatrix& J) {
  const auto entries = J.upper_entries();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << J.size() << ' ' << J.size() << ' ' << entries.size() << '\n';
  // Lower triangle, as most tools emit it.
  for (const auto& e : entries)
    out << e.col + 1 << ' ' << e.row + 1 << ' ' << format_double(e.value) << '\n';
}

inline void write_general_matrix(std::ostream& out, const RectMatrix& M) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.rows() << ' ' << M.cols() << ' ' << M.entries().size() << '\n';
  for (const auto& e : M.entries())
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << format_double(e.value) << '\n';
}

/// One real per line; blank lines and lines starting with '#' are skipped.
inline DenseVector read_vector(std::istream& in) {
  DenseVector v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0;
    std::string rest;
    if (!(ls >> x) || (ls >> rest)) throw ParseError("expected one real per line", line_no);
    if (!std::isfinite(x)) throw ParseError("non-finite vector entry", line_no);
    v.push_back(x);
  }
  return v;
}

inline void write_vector(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << format_double(x) << '\n';
}

namespace detail {

template <typename Fn>
auto with_file(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

}  // namespace detail

inline SparseSymMatrix load_symmetric_matrix(const std::string& path) {
  return detail::with_file(path, [](std::istream& in) { return read_symmetric_matrix(in); });
}

inline RectMatrix load_general_matrix(const std::string& path) {
  return detail::with_file(path, [](std::istream& in) { return read_general_matrix(in); });
}

inline DenseVector load_vector(const std::string& path) {
  return detail::with_file(path, [](std::istream& in) { return read_vector(in); });
}

}  // namespace gabpfix

#endif  // GABPFIX_MATRIX_MARKET_HPP
