#pragma once

/// \file matrix_market.hpp
/// \brief Reader and writer for Matrix Market `coordinate real` files.
///
/// Accepted header: `%%MatrixMarket matrix coordinate real general|symmetric`.
/// Indices are 1-based on disk and 0-based in memory. Duplicate entries are
/// summed; symmetric files are expanded to full storage.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adkrylov/sparse.hpp"

namespace adkrylov {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedFormatError : public std::runtime_error {
 public:
  explicit UnsupportedFormatError(const std::string& token)
      : std::runtime_error("unsupported Matrix Market format: '" + token + "'"), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class N>
bool parse_number(std::string_view tok, N& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if constexpr (std::is_floating_point_v<N>) {
    if (first != last && *first == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace detail

inline CsrMatrix<double> parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  ++lineno;
  const auto head = detail::split_ws(line);
  if (head.size() != 5 || detail::lowercase(std::string(head[0])) != "%%matrixmarket")
    throw ParseError("missing '%%MatrixMarket' banner", lineno);
  const std::string object = detail::lowercase(std::string(head[1]));
  const std::string format = detail::lowercase(std::string(head[2]));
  const std::string field = detail::lowercase(std::string(head[3]));
  const std::string symmetry = detail::lowercase(std::string(head[4]));
  if (object != "matrix") throw UnsupportedFormatError(std::string(head[1]));
  if (format != "coordinate") throw UnsupportedFormatError(std::string(head[2]));
  if (field != "real") throw UnsupportedFormatError(std::string(head[3]));
  if (symmetry != "general" && symmetry != "symmetric")
    throw UnsupportedFormatError(std::string(head[4]));
  const bool symmetric = symmetry == "symmetric";

  // Size line follows any number of comments.
  std::size_t nrows = 0, ncols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank(line)) continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 3 || !detail::parse_number(tok[0], nrows) ||
        !detail::parse_number(tok[1], ncols) || !detail::parse_number(tok[2], nnz))
      throw ParseError("malformed size line", lineno);
    break;
  }
  if (symmetric && nrows != ncols) throw ParseError("symmetric matrix must be square", lineno);

  std::vector<Triplet<double>> entries;
  entries.reserve(symmetric ? 2 * nnz : nnz);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || detail::blank(line)) continue;
    const auto tok = detail::split_ws(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (tok.size() != 3 || !detail::parse_number(tok[0], i) || !detail::parse_number(tok[1], j) ||
        !detail::parse_number(tok[2], v))
      throw ParseError("malformed entry", lineno);
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") out of range",
                       lineno);
    if (++seen > nnz) throw ParseError("more entries than declared", lineno);
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
  }
  if (seen != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen),
                     lineno);
  return CsrMatrix<double>::from_triplets(nrows, ncols, std::move(entries));
}

inline CsrMatrix<double> parse_matrix_market(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matrix_market(in);
}

inline CsrMatrix<double> read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  return parse_matrix_market(in);
}

/// Shortest round-trip text for a double, independent of locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Writes `coordinate real general`, row-major order.
inline std::string write_matrix_market(const CsrMatrix<double>& a) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.rows()) + ' ' + std::to_string(a.cols()) + ' ' +
         std::to_string(a.nonzeros()) + '\n';
  for (const auto& t : a.triplets()) {
    out += std::to_string(t.row + 1) + ' ' + std::to_string(t.col + 1) + ' ' +
           format_double(t.value) + '\n';
  }
  return out;
}

}  // namespace adkrylov
