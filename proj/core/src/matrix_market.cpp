#include "kexp/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kexp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

SparseOperator read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw std::runtime_error("matrix market: only 'matrix coordinate' files are supported");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  const bool is_complex = field == "complex";
  if (!is_complex && field != "real" && field != "integer") {
    throw std::runtime_error("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric") {
    throw std::runtime_error("matrix market: unsupported symmetry '" + symmetry + "'");
  }

  do {
    if (!std::getline(in, line)) throw std::runtime_error("matrix market: missing size line");
  } while (line.empty() || line[0] == '%');
  std::size_t rows = 0, cols = 0, entries = 0;
  std::istringstream size_line(line);
  if (!(size_line >> rows >> cols >> entries)) throw std::runtime_error("matrix market: bad size line");
  if (rows != cols) throw std::runtime_error("matrix market: operator must be square");

  std::vector<Triplet> triplets;
  triplets.reserve(symmetry == "general" ? entries : 2 * entries);
  for (std::size_t k = 0; k < entries; ++k) {
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> i >> j >> re)) throw std::runtime_error("matrix market: truncated entry list");
    if (is_complex && !(in >> im)) throw std::runtime_error("matrix market: truncated entry list");
    if (i == 0 || j == 0 || i > rows || j > cols) throw std::runtime_error("matrix market: index out of range");
    const Complex v(re, im);
    triplets.push_back({i - 1, j - 1, v});
    if (i != j) {
      if (symmetry == "symmetric") triplets.push_back({j - 1, i - 1, v});
      if (symmetry == "hermitian") triplets.push_back({j - 1, i - 1, std::conj(v)});
      if (symmetry == "skew-symmetric") triplets.push_back({j - 1, i - 1, -v});
    }
  }
  Structure s = Structure::general;
  if (symmetry == "hermitian" || (symmetry == "symmetric" && !is_complex)) s = Structure::hermitian;
  return SparseOperator::from_triplets(rows, std::move(triplets), s);
}

SparseOperator read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix market: cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseOperator& a) {
  const bool hermitian = a.structure() == Structure::hermitian;
  std::vector<Triplet> entries = a.to_triplets();
  if (hermitian) {
    std::erase_if(entries, [](const Triplet& t) { return t.col > t.row; });
  }
  // Column-major order, the customary layout for coordinate files.
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  out << "%%MatrixMarket matrix coordinate complex " << (hermitian ? "hermitian" : "general") << '\n';
  out << a.dimension() << ' ' << a.dimension() << ' ' << entries.size() << '\n';
  out << std::setprecision(17);
  for (const Triplet& t : entries) {
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value.real() << ' ' << t.value.imag() << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseOperator& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("matrix market: cannot write " + path.string());
  write_matrix_market(out, a);
}

}  // namespace kexp
