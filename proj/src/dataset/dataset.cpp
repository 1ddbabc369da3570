#include "dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace faasprof {

std::size_t Dataset::rows() const {
  if (columns.empty()) return 0;
  const auto& c = columns.front();
  return c.numeric ? c.values.size() : c.text.size();
}

bool Dataset::has(const std::string& name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const Column& c) { return c.name == name; });
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw DataError(fmt::format("missing column '{}'", name));
}

Column& Dataset::column(const std::string& name) {
  for (auto& c : columns)
    if (c.name == name) return c;
  throw DataError(fmt::format("missing column '{}'", name));
}

std::vector<std::string> Dataset::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

std::span<const double> Dataset::numeric(const std::string& name) const {
  const Column& c = column(name);
  if (!c.numeric) throw DataError(fmt::format("column '{}' is not numeric", name));
  return c.values;
}

Dataset Dataset::select(std::span<const std::size_t> idx) const {
  Dataset out;
  out.target = target;
  out.features = features;
  out.rejected = rejected;
  out.provenance = provenance;
  for (const auto& c : columns) {
    Column n;
    n.name = c.name;
    n.numeric = c.numeric;
    n.source = c.source;
    n.binary = c.binary;
    for (auto i : idx) {
      if (c.numeric)
        n.values.push_back(c.values.at(i));
      else
        n.text.push_back(c.text.at(i));
    }
    out.columns.push_back(std::move(n));
  }
  return out;
}

Matrix Dataset::matrix(std::span<const std::string> names) const {
  Matrix m(rows(), names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto v = numeric(names[j]);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, j) = v[i];
  }
  return m;
}

void Dataset::add_column(Column c) {
  if (has(c.name)) throw DataError(fmt::format("duplicate column '{}'", c.name));
  const std::size_t n = c.numeric ? c.values.size() : c.text.size();
  if (!columns.empty() && n != rows())
    throw DataError(fmt::format("column '{}' has {} rows, expected {}", c.name, n, rows()));
  columns.push_back(std::move(c));
}

const std::vector<std::string>& job_csv_header() {
  static const std::vector<std::string> h{"run_id",  "component", "resource",       "cores",
                                          "batch_size", "lambda", "rep",            "wait_s",
                                          "pod_creation_s", "overhead_s", "compute_s", "runtime_s"};
  return h;
}

const std::vector<std::string>& run_csv_header() {
  static const std::vector<std::string> h{"run_id",     "scope",  "component",       "resource",
                                          "cores",      "batch_size", "lambda",      "rep",
                                          "jobs",       "runtime_s",  "mean_job_s",  "mean_response_s",
                                          "throughput_rps", "saturated"};
  return h;
}

namespace {

const std::set<std::string>& known_text_columns() {
  static const std::set<std::string> s{"run_id", "component", "resource", "scope"};
  return s;
}

bool known_numeric(const std::string& name) {
  const auto& a = job_csv_header();
  const auto& b = run_csv_header();
  if (known_text_columns().count(name)) return false;
  return std::find(a.begin(), a.end(), name) != a.end() || std::find(b.begin(), b.end(), name) != b.end();
}

}  // namespace

Dataset load_dataset(const std::string& path, const std::string& target) {
  const csv::Table table = csv::read_file(path);
  const std::size_t ncols = table.header.size();

  std::set<std::string> seen;
  for (const auto& h : table.header)
    if (!seen.insert(h).second) throw DataError(fmt::format("'{}': duplicate column '{}'", path, h));
  if (!seen.count(target)) throw DataError(fmt::format("'{}': missing target column '{}'", path, target));

  std::vector<const csv::Row*> wellformed;
  std::vector<std::size_t> lines;
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != ncols) {
      ++rejected;
      continue;
    }
    wellformed.push_back(&table.rows[i]);
    lines.push_back(table.line_numbers[i]);
  }

  std::vector<bool> numeric(ncols, true);
  for (std::size_t c = 0; c < ncols; ++c) {
    const auto& name = table.header[c];
    if (known_text_columns().count(name)) {
      numeric[c] = false;
    } else if (!known_numeric(name)) {
      for (const auto* row : wellformed) {
        const auto& cell = (*row)[c];
        if (cell.empty()) continue;
        numeric[c] = csv::parse_number(cell).has_value();
        break;
      }
    }
  }
  if (target.empty() || !numeric[static_cast<std::size_t>(
                            std::find(table.header.begin(), table.header.end(), target) - table.header.begin())])
    throw DataError(fmt::format("'{}': target column '{}' is not numeric", path, target));

  Dataset d;
  d.target = target;
  d.provenance = path;
  for (std::size_t c = 0; c < ncols; ++c) {
    Column col;
    col.name = table.header[c];
    col.numeric = numeric[c];
    col.source = col.name;
    d.columns.push_back(std::move(col));
  }
  const std::size_t tcol =
      static_cast<std::size_t>(std::find(table.header.begin(), table.header.end(), target) - table.header.begin());

  for (std::size_t r = 0; r < wellformed.size(); ++r) {
    const auto& row = *wellformed[r];
    std::vector<double> parsed(ncols, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!numeric[c] || row[c].empty()) continue;
      auto v = csv::parse_number(row[c]);
      if (!v)
        throw DataError(fmt::format("'{}' line {}: non-numeric value '{}' in numeric column '{}'", path,
                                    lines[r], row[c], table.header[c]));
      parsed[c] = *v;
    }
    const double t = parsed[tcol];
    if (std::isnan(t) || t == 0.0 || !std::isfinite(t)) {
      ++rejected;
      continue;
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      if (numeric[c])
        d.columns[c].values.push_back(parsed[c]);
      else
        d.columns[c].text.push_back(row[c]);
    }
  }
  d.rejected = rejected;
  if (d.rows() == 0) throw DataError(fmt::format("'{}' has no valid data rows", path));
  return d;
}

Dataset make_dataset(std::span<const std::string> names, const Matrix& values, std::string target,
                     std::vector<std::string> features) {
  if (names.size() != values.cols()) throw DataError("column names do not match matrix width");
  Dataset d;
  for (std::size_t c = 0; c < names.size(); ++c) {
    Column col;
    col.name = names[c];
    col.source = names[c];
    for (std::size_t r = 0; r < values.rows(); ++r) col.values.push_back(values(r, c));
    d.add_column(std::move(col));
  }
  d.target = std::move(target);
  d.features = std::move(features);
  return d;
}

// --- row predicates ------------------------------------------------------------

RowPredicate RowPredicate::parse(const std::string& text) {
  static const std::pair<const char*, CompareOp> ops[] = {
      {"==", CompareOp::eq}, {"!=", CompareOp::ne}, {"<=", CompareOp::le},
      {">=", CompareOp::ge}, {"<", CompareOp::lt},  {">", CompareOp::gt}};
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  for (const auto& [tok, op] : ops) {
    const auto pos = text.find(tok);
    if (pos == std::string::npos) continue;
    RowPredicate p;
    p.column = trim(text.substr(0, pos));
    p.op = op;
    p.value = trim(text.substr(pos + std::char_traits<char>::length(tok)));
    if (p.value.size() >= 2 && (p.value.front() == '"' || p.value.front() == '\'') &&
        p.value.back() == p.value.front())
      p.value = p.value.substr(1, p.value.size() - 2);
    if (p.column.empty()) break;
    return p;
  }
  throw ConfigError(fmt::format("cannot parse row predicate '{}'", text));
}

bool RowPredicate::test(const Dataset& d, std::size_t row) const {
  const Column& c = d.column(column);
  int cmp;
  if (c.numeric) {
    auto v = csv::parse_number(value);
    if (!v) throw DataError(fmt::format("predicate on numeric column '{}' needs a number, got '{}'", column, value));
    const double x = c.values[row];
    if (std::isnan(x)) return op == CompareOp::ne;
    cmp = x < *v ? -1 : (x > *v ? 1 : 0);
  } else {
    const int r = c.text[row].compare(value);
    cmp = r < 0 ? -1 : (r > 0 ? 1 : 0);
  }
  switch (op) {
    case CompareOp::eq: return cmp == 0;
    case CompareOp::ne: return cmp != 0;
    case CompareOp::lt: return cmp < 0;
    case CompareOp::le: return cmp <= 0;
    case CompareOp::gt: return cmp > 0;
    case CompareOp::ge: return cmp >= 0;
  }
  return false;
}

std::string RowPredicate::str() const {
  static const char* names[] = {"==", "!=", "<", "<=", ">", ">="};
  return column + ' ' + names[static_cast<int>(op)] + ' ' + value;
}

}  // namespace faasprof
