#include "bfcs/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace bfcs {

namespace {

constexpr char kMatrixMagic[8] = {'B', 'F', 'C', 'S', 'M', 'A', 'T', '1'};
constexpr char kSignMagic[8] = {'B', 'F', 'C', 'S', 'S', 'G', 'N', '1'};

void write_header(std::ofstream& out, const char magic[8], std::uint64_t rows,
                  std::uint64_t cols) {
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
}

std::pair<std::uint64_t, std::uint64_t> read_header(std::ifstream& in,
                                                    const char magic[8],
                                                    const char* what) {
  char found[8];
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(found, 8);
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || std::memcmp(found, magic, 8) != 0) {
    throw InvalidInput(std::string(what) + ": bad header");
  }
  return {rows, cols};
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw InvalidInput("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InvalidInput("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shorter %.15g form when it round-trips.
  char shorter[48];
  std::snprintf(shorter, sizeof(shorter), "%.15g", v);
  if (std::strtod(shorter, nullptr) == v || std::isnan(v)) return shorter;
  return buf;
}

void save_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path, true);
  write_header(out, kMatrixMagic, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw InvalidInput("write failed: " + path.string());
}

Matrix load_matrix_binary(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  const auto [rows, cols] = read_header(in, kMatrixMagic, "matrix container");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(i, j) = v;
    }
  }
  if (!in) throw InvalidInput("truncated matrix container: " + path.string());
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path, false);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw InvalidInput("write failed: " + path.string());
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      row.push_back(std::strtod(field.c_str(), nullptr));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput("ragged CSV: " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("empty CSV: " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

void save_sign_matrix(const std::filesystem::path& path, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 1.0 && m(i, j) != -1.0) {
        throw InvalidInput("save_sign_matrix: entry outside {-1,+1}");
      }
    }
  }
  auto out = open_out(path, true);
  write_header(out, kSignMagic, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto v = static_cast<std::int8_t>(m(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw InvalidInput("write failed: " + path.string());
}

Matrix load_sign_matrix(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  const auto [rows, cols] = read_header(in, kSignMagic, "sign container");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::int8_t v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (v != 1 && v != -1) {
        throw InvalidInput("sign container: entry outside {-1,+1}");
      }
      m(i, j) = v;
    }
  }
  if (!in) throw InvalidInput("truncated sign container: " + path.string());
  return m;
}

void save_pgm(const std::filesystem::path& path, const Matrix& m) {
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  auto out = open_out(path, true);
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double scaled =
          span > 0.0 ? (m(i, j) - lo) / span * 255.0 : 0.0;
      const auto pixel = static_cast<unsigned char>(std::lround(scaled));
      out.write(reinterpret_cast<const char*>(&pixel), 1);
    }
  }
  if (!out) throw InvalidInput("write failed: " + path.string());

  auto meta = open_out(path.string() + ".meta", false);
  meta << "min=" << format_double(lo) << "\nmax=" << format_double(hi) << "\n";
}

}  // namespace bfcs
