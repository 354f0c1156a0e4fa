#include "plm/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace plm {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, long line, const std::string& col) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != e)
    throw ParseError(line, "column '" + col + "': cannot parse '" + s + "' as a number");
  return v;
}

}  // namespace

CsvTable parse_csv_table(std::istream& in) {
  CsvTable t;
  std::string raw;
  long line = 0;
  long header_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(s);
      header_line = line;
      for (const auto& h : t.header)
        if (h.empty()) throw ParseError(line, "empty column name in header");
      continue;
    }
    auto fields = split(s);
    if (fields.size() != t.header.size())
      throw ParseError(line, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) row[k] = parse_number(fields[k], line, t.header[k]);
    t.rows.push_back(std::move(row));
    t.lines.push_back(line);
  }
  if (t.header.empty()) throw ParseError(line, "no header line");
  (void)header_line;
  return t;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv_table(in);
}

std::vector<int> numbered_columns(const CsvTable& t, const std::string& prefix, int min_count) {
  std::vector<int> cols;
  int k = 1;
  for (;; ++k) {
    const int c = t.column(prefix + std::to_string(k));
    if (c < 0) break;
    cols.push_back(c);
  }
  // a later index present after a gap means a column is missing
  for (int extra = k + 1; extra <= k + 16; ++extra)
    if (t.column(prefix + std::to_string(extra)) >= 0)
      throw ParseError(1, "missing column '" + prefix + std::to_string(k) + "'");
  if (static_cast<int>(cols.size()) < min_count)
    throw ParseError(1, "missing column '" + prefix + std::to_string(cols.size() + 1) + "'");
  return cols;
}

FieldGrid grid_from_table(const CsvTable& t, const std::string& value_prefix) {
  std::vector<int> coord_cols;
  if (t.column("x") >= 0) {
    if (t.column("y") < 0) throw ParseError(1, "missing column 'y'");
    coord_cols = {t.column("x"), t.column("y")};
  } else if (t.column("x1") >= 0) {
    coord_cols = numbered_columns(t, "x");
  } else {
    throw ParseError(1, "missing column 'x'");
  }
  const auto vcols = numbered_columns(t, value_prefix);
  if (vcols.size() > static_cast<std::size_t>(kMaxDim))
    throw ParseError(1, "more than " + std::to_string(kMaxDim) + " value columns");
  if (t.rows.empty()) throw ParseError(1, "no data rows");

  const int nd = static_cast<int>(coord_cols.size());
  GridSpec spec;
  for (int a = 0; a < nd; ++a) {
    std::vector<double> vals;
    for (const auto& r : t.rows) vals.push_back(r[coord_cols[a]]);
    std::sort(vals.begin(), vals.end());
    std::vector<double> uniq;
    for (double v : vals)
      if (uniq.empty() || std::abs(v - uniq.back()) > 1e-12 * std::max(1.0, std::abs(v))) uniq.push_back(v);
    const std::string name = t.header[coord_cols[a]];
    if (uniq.size() < 2) throw ParseError(t.lines.front(), "axis '" + name + "' has fewer than two samples");
    const double h = (uniq.back() - uniq.front()) / static_cast<double>(uniq.size() - 1);
    const double scale = std::max(std::abs(uniq.front()), std::abs(uniq.back()));
    for (std::size_t k = 1; k < uniq.size(); ++k) {
      const double d = uniq[k] - uniq[k - 1];
      if (std::abs(d - h) > 1e-12 * h + 4e-16 * scale) {
        long where = t.lines.front();
        for (std::size_t r = 0; r < t.rows.size(); ++r)
          if (t.rows[r][coord_cols[a]] == uniq[k]) {
            where = t.lines[r];
            break;
          }
        throw ParseError(where, "non-uniform spacing on axis '" + name + "'");
      }
    }
    spec.origin.push_back(uniq.front());
    spec.spacing.push_back(h);
    spec.dims.push_back(static_cast<int>(uniq.size()));
  }
  if (spec.count() != t.rows.size())
    throw ParseError(t.lines.back(), "inconsistent dims: " + std::to_string(t.rows.size()) +
                                         " rows for a grid of " + std::to_string(spec.count()) + " points");
  FieldGrid g(spec, static_cast<int>(vcols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto idx = spec.unflat(r);
    for (int a = 0; a < nd; ++a) {
      const double c = t.rows[r][coord_cols[a]];
      const double expect = spec.coord(a, idx[a]);
      if (std::abs(c - expect) > 1e-9 * spec.spacing[a])
        throw ParseError(t.lines[r], "row out of order: expected " + t.header[coord_cols[a]] + " = " +
                                         format_double(expect) + " (x varies fastest)");
    }
    Vec v(static_cast<int>(vcols.size()));
    for (std::size_t k = 0; k < vcols.size(); ++k) {
      v[static_cast<int>(k)] = t.rows[r][vcols[k]];
      if (!std::isfinite(v[static_cast<int>(k)])) throw ParseError(t.lines[r], "non-finite sample");
    }
    g.values()[r] = v;
  }
  return g;
}

FieldGrid read_grid_csv(const std::string& path) { return grid_from_table(read_csv_table(path)); }

namespace {

void write_comment(std::ostream& out, const std::string& comment) {
  if (comment.empty()) return;
  std::istringstream ss(comment);
  std::string l;
  while (std::getline(ss, l)) out << "# " << l << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_grid_csv(const FieldGrid& g, std::ostream& out, const std::string& comment) {
  write_comment(out, comment);
  const auto& s = g.spec();
  const int nd = s.ndim();
  if (nd == 2) {
    out << "x,y";
  } else {
    for (int a = 0; a < nd; ++a) out << (a ? "," : "") << 'x' << a + 1;
  }
  for (int k = 0; k < g.vdim(); ++k) out << ",v" << k + 1;
  out << '\n';
  for (std::size_t r = 0; r < s.count(); ++r) {
    const auto idx = s.unflat(r);
    for (int a = 0; a < nd; ++a) out << (a ? "," : "") << format_double(s.coord(a, idx[a]));
    for (double v : g.values()[r]) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_grid_csv(const FieldGrid& g, const std::string& path, const std::string& comment) {
  auto out = open_out(path);
  write_grid_csv(g, out, comment);
  if (!out) throw IoError("write to '" + path + "' failed");
}

LatticeField lattice_from_table(const CsvTable& t) {
  const int c1 = t.column("n1"), c2 = t.column("n2");
  if (c1 < 0) throw ParseError(1, "missing column 'n1'");
  if (c2 < 0) throw ParseError(1, "missing column 'n2'");
  const auto vcols = numbered_columns(t, "v");
  if (t.rows.empty()) throw ParseError(1, "no data rows");
  auto as_int = [&](std::size_t r, int c) {
    const double v = t.rows[r][c];
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError(t.lines[r], "non-integer lattice site");
    return static_cast<int>(v);
  };
  int lo1 = as_int(0, c1), hi1 = lo1, lo2 = as_int(0, c2), hi2 = lo2;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    lo1 = std::min(lo1, as_int(r, c1));
    hi1 = std::max(hi1, as_int(r, c1));
    lo2 = std::min(lo2, as_int(r, c2));
    hi2 = std::max(hi2, as_int(r, c2));
  }
  LatticeField lat(hi1 - lo1 + 1, hi2 - lo2 + 1, static_cast<int>(vcols.size()), lo1, lo2);
  if (t.rows.size() != static_cast<std::size_t>(lat.extent1()) * lat.extent2())
    throw ParseError(t.lines.back(), "inconsistent dims: lattice sites do not fill a rectangle");
  std::vector<char> seen(t.rows.size(), 0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int n1 = as_int(r, c1), n2 = as_int(r, c2);
    const std::size_t k = static_cast<std::size_t>(n1 - lo1) + static_cast<std::size_t>(lat.extent1()) * (n2 - lo2);
    if (seen[k]) throw ParseError(t.lines[r], "duplicate lattice site");
    seen[k] = 1;
    Vec v(static_cast<int>(vcols.size()));
    for (std::size_t q = 0; q < vcols.size(); ++q) v[static_cast<int>(q)] = t.rows[r][vcols[q]];
    if (!all_finite(v)) throw ParseError(t.lines[r], "non-finite sample");
    lat.at(n1, n2) = v;
  }
  return lat;
}

LatticeField read_lattice_csv(const std::string& path) { return lattice_from_table(read_csv_table(path)); }

void write_lattice_csv(const LatticeField& lat, std::ostream& out, const std::string& comment) {
  write_comment(out, comment);
  out << "n1,n2";
  for (int k = 0; k < lat.vdim(); ++k) out << ",v" << k + 1;
  out << '\n';
  for (int n2 = lat.lo2(); n2 < lat.hi2(); ++n2)
    for (int n1 = lat.lo1(); n1 < lat.hi1(); ++n1) {
      out << n1 << ',' << n2;
      for (double v : lat.at(n1, n2)) out << ',' << format_double(v);
      out << '\n';
    }
}

void write_lattice_csv(const LatticeField& lat, const std::string& path, const std::string& comment) {
  auto out = open_out(path);
  write_lattice_csv(lat, out, comment);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::variant<FieldGrid, LatticeField> read_field(const std::string& path) {
  auto t = read_csv_table(path);
  if (t.column("n1") >= 0) return lattice_from_table(t);
  return grid_from_table(t);
}

}  // namespace plm
