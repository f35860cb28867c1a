#include "sparsefact/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sparsefact {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("matrix read: " + what);
}

long long parse_count(const std::string& tok, const char* name) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    fail(std::string("bad ") + name);
  }
  if (pos != tok.size() || v < 0) fail(std::string("bad ") + name);
  return v;
}

double parse_value(const std::string& tok) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail("bad value token '" + tok + "'");
  }
  if (pos != tok.size()) fail("bad value token '" + tok + "'");
  if (!std::isfinite(v)) fail("non-finite value");
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MatrixFile read_matrix(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) fail("missing header");
  const auto head = tokens(line);
  if (head.size() < 1) fail("missing header");

  MatrixFile out;
  if (head[0] == "dense") {
    if (head.size() != 3) fail("dense header needs 2 counts");
    const long long r = parse_count(head[1], "row count");
    const long long c = parse_count(head[2], "col count");
    out.is_sparse = false;
    out.dense = Matrix(r, c);
    for (long long i = 0; i < r; ++i) {
      if (!next_line(in, line)) fail("truncated dense body");
      const auto row = tokens(line);
      if (static_cast<long long>(row.size()) != c)
        fail("dense row has wrong entry count");
      for (long long j = 0; j < c; ++j) out.dense(i, j) = parse_value(row[j]);
    }
  } else if (head[0] == "sparse") {
    if (head.size() != 4) fail("sparse header needs 3 counts");
    const long long r = parse_count(head[1], "row count");
    const long long c = parse_count(head[2], "col count");
    const long long nnz = parse_count(head[3], "nnz count");
    std::vector<Triplet> ts;
    ts.reserve(nnz);
    for (long long k = 0; k < nnz; ++k) {
      if (!next_line(in, line)) fail("truncated sparse body");
      const auto row = tokens(line);
      if (row.size() != 3) fail("sparse triplet needs 3 tokens");
      Triplet t;
      t.row = parse_count(row[0], "row index");
      t.col = parse_count(row[1], "col index");
      t.value = parse_value(row[2]);
      ts.push_back(t);
    }
    out.is_sparse = true;
    try {
      out.coo = CooMatrix(r, c, std::move(ts));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  } else {
    fail("unknown header kind '" + head[0] + "'");
  }
  if (next_line(in, line)) fail("trailing content after body");
  return out;
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix read: cannot open " + path);
  return read_matrix(in);
}

Matrix as_dense(const MatrixFile& f) {
  return f.is_sparse ? f.coo.to_dense() : f.dense;
}

void write_dense(std::ostream& out, const Matrix& m) {
  out << "dense " << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_value(m(i, j));
    }
    out << '\n';
  }
}

void write_sparse(std::ostream& out, const CooMatrix& m) {
  out << "sparse " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (const Triplet& t : m.triplets())
    out << t.row << ' ' << t.col << ' ' << format_value(t.value) << '\n';
}

void write_dense_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("matrix write: cannot open " + path);
  write_dense(out, m);
}

void write_sparse_file(const std::string& path, const CooMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("matrix write: cannot open " + path);
  write_sparse(out, m);
}

}  // namespace sparsefact
