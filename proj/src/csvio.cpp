#include "profex/csvio.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace profex {

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Index CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Index>(i);
  return -1;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable t;
  std::string line;
  int lineno = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      for (auto& c : cells) t.header.push_back(trim(c));
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.header.size()) + " columns, got " +
                               std::to_string(cells.size()));
    std::vector<double> row;
    for (size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell +
                                 "' in column " + t.header[c]);
      }
    }
    rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::runtime_error(path + ": missing header row");
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << format_real(values(r, c));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace {

std::vector<std::string> curve_header(Index p, Index d) {
  std::vector<std::string> h;
  if (p == 1) {
    h.push_back("eta");
  } else {
    for (Index c = 0; c < p; ++c) h.push_back("eta_" + std::to_string(c + 1));
  }
  h.push_back("sup");
  h.push_back("inf");
  for (Index i = 0; i < d; ++i) h.push_back("argmax_" + std::to_string(i + 1));
  for (Index i = 0; i < d; ++i) h.push_back("argmin_" + std::to_string(i + 1));
  return h;
}

}  // namespace

void write_curve_csv(const std::string& path, const ProfileCurve& curve) {
  const Index g = curve.etas.size();
  const Index d = curve.argmax.cols();
  Matrix vals(g, 3 + 2 * d);
  vals.col(0) = curve.etas;
  vals.col(1) = curve.sup;
  vals.col(2) = curve.inf;
  for (Index i = 0; i < d; ++i) {
    vals.col(3 + i) = curve.argmax.col(i);
    vals.col(3 + d + i) = curve.argmin.col(i);
  }
  write_csv(path, curve_header(1, d), vals);
}

void write_map_csv(const std::string& path, const ProfileMap& map) {
  const Index g = map.grid.size();
  const Index d = map.argmax.cols();
  Matrix vals(g, 4 + 2 * d);
  vals.col(0) = map.grid.etas.col(0);
  vals.col(1) = map.grid.etas.col(1);
  vals.col(2) = map.sup;
  vals.col(3) = map.inf;
  for (Index i = 0; i < d; ++i) {
    vals.col(4 + i) = map.argmax.col(i);
    vals.col(4 + d + i) = map.argmin.col(i);
  }
  write_csv(path, curve_header(2, d), vals);
}

void write_envelope_csv(const std::string& path, const ProfileCurve& curve, bool sup_side,
                        const EnvelopeColumns& env) {
  const Index g = curve.etas.size();
  std::vector<std::string> h = {"eta", sup_side ? "sup" : "inf",
                                "q_lo", "q_hi", "u_lo", "u_hi", "sigma_delta"};
  Matrix vals(g, 7);
  vals.col(0) = curve.etas;
  vals.col(1) = sup_side ? curve.sup : curve.inf;
  vals.col(2) = env.q_lo;
  vals.col(3) = env.q_hi;
  vals.col(4) = env.u_lo;
  vals.col(5) = env.u_hi;
  vals.col(6) = env.sigma_delta;
  write_csv(path, h, vals);
}

void write_map_envelope_csv(const std::string& path, const ProfileMap& map, bool sup_side,
                            const EnvelopeColumns& env) {
  const Index g = map.grid.size();
  std::vector<std::string> h = {"eta_1", "eta_2", sup_side ? "sup" : "inf",
                                "q_lo", "q_hi", "u_lo", "u_hi", "sigma_delta"};
  Matrix vals(g, 8);
  vals.col(0) = map.grid.etas.col(0);
  vals.col(1) = map.grid.etas.col(1);
  vals.col(2) = sup_side ? map.sup : map.inf;
  vals.col(3) = env.q_lo;
  vals.col(4) = env.q_hi;
  vals.col(5) = env.u_lo;
  vals.col(6) = env.u_hi;
  vals.col(7) = env.sigma_delta;
  write_csv(path, h, vals);
}

}  // namespace profex
