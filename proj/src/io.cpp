#include "rvine/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace rvine {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (cell.empty() || end != s + cell.size() || !std::isfinite(v))
    throw validation_error("cell '" + cell + "' at data row " +
                           std::to_string(row + 1) + ", column " +
                           std::to_string(col + 1) +
                           " is not a finite number");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line))
    throw validation_error("'" + path + "' is empty");
  Table t;
  t.header = split_commas(line);
  if (t.header.empty() || (t.header.size() == 1 && t.header[0].empty()))
    throw validation_error("'" + path + "' has an empty header");
  t.cols.assign(t.header.size(), {});
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != t.header.size())
      throw validation_error("data row " + std::to_string(row + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(t.header.size()));
    for (std::size_t c = 0; c < cells.size(); ++c)
      t.cols[c].push_back(parse_cell(cells[c], row, c));
    ++row;
  }
  if (row == 0)
    throw validation_error("'" + path + "' has no data rows");
  return t;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& cols) {
  if (header.size() != cols.size())
    throw validation_error("header and column counts differ");
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (const auto& c : cols)
    if (c.size() != rows)
      throw validation_error("columns differ in length");
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      out << (c ? "," : "") << format_double(cols[c][r]);
    out << "\n";
  }
  if (!out) throw validation_error("failed writing '" + path + "'");
}

std::vector<double> midranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) +
                              static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  return rank;
}

CopulaSample pit_transform(const Table& table) {
  if (table.n_cols() == 0 || table.n_rows() == 0)
    throw validation_error("table has no data to transform");
  const double denom = static_cast<double>(table.n_rows()) + 1.0;
  CopulaSample out;
  out.col.reserve(table.n_cols());
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    const auto& x = table.cols[c];
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mn == *mx)
      throw validation_error("column '" + table.header[c] + "' is constant");
    std::vector<double> u = midranks(x);
    for (double& v : u) v /= denom;
    out.col.push_back(std::move(u));
  }
  return out;
}

void save_model(const std::string& path, const RVineModel& model) {
  check_model(model);
  const std::size_t n = model.dim();
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  out << "rvine-model v1\n";
  out << "n " << n << "\n";
  out << "structure\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      out << (c ? " " : "") << model.structure(r, c);
    out << "\n";
  }
  out << "families\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      out << (c ? " " : "") << family_code(model.cells[r * n + c].family);
    out << "\n";
  }
  out << "theta\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      out << (c ? " " : "") << format_double(model.cells[r * n + c].theta);
    out << "\n";
  }
  out << "nu\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      out << (c ? " " : "") << format_double(model.cells[r * n + c].nu);
    out << "\n";
  }
  if (!out) throw validation_error("failed writing '" + path + "'");
}

namespace {

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok))
    throw validation_error(std::string("model file ends before ") + what);
  return tok;
}

void expect_token(std::istream& in, const std::string& want) {
  const std::string tok = next_token(in, want.c_str());
  if (tok != want)
    throw validation_error("expected '" + want + "' in model file, found '" +
                           tok + "'");
}

}  // namespace

RVineModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "' for reading");
  expect_token(in, "rvine-model");
  expect_token(in, "v1");
  expect_token(in, "n");
  std::size_t n = 0;
  if (!(in >> n) || n == 0 || n > 64)
    throw validation_error("model file has a bad dimension");

  RVineModel model{RVineMatrix(n)};
  expect_token(in, "structure");
  for (std::size_t i = 0; i < n * n; ++i) {
    long long v;
    if (!(in >> v) || v < 0)
      throw validation_error("bad structure entry in model file");
    model.structure.m[i] = static_cast<std::uint32_t>(v);
  }
  expect_token(in, "families");
  for (std::size_t i = 0; i < n * n; ++i) {
    int code;
    if (!(in >> code))
      throw validation_error("bad family code in model file");
    model.cells[i].family = family_from_code(code);
  }
  expect_token(in, "theta");
  for (std::size_t i = 0; i < n * n; ++i) {
    std::string tok = next_token(in, "a theta entry");
    model.cells[i].theta = parse_cell(tok, i / n, i % n);
  }
  expect_token(in, "nu");
  for (std::size_t i = 0; i < n * n; ++i) {
    std::string tok = next_token(in, "a nu entry");
    model.cells[i].nu = parse_cell(tok, i / n, i % n);
  }
  check_model(model);
  return model;
}

}  // namespace rvine
