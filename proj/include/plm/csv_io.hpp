#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "plm/fields.hpp"

namespace plm {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<long> lines;  // physical line number of each row

  int column(const std::string& name) const;  // -1 when absent
};

// Comma-separated, first non-comment line is the header, '#' starts a comment line.
CsvTable parse_csv_table(std::istream& in);
CsvTable read_csv_table(const std::string& path);

// Columns `prefix1 .. prefixK`, consecutive, starting at the first match. Names
// the first missing column when the sequence has a gap.
std::vector<int> numbered_columns(const CsvTable& t, const std::string& prefix, int min_count = 1);

// Grid header: x,y,v1..vd (2D) or x1..xn,v1..vd (nD); x varies fastest.
FieldGrid grid_from_table(const CsvTable& t, const std::string& value_prefix = "v");
FieldGrid read_grid_csv(const std::string& path);
void write_grid_csv(const FieldGrid& g, const std::string& path, const std::string& comment = {});
void write_grid_csv(const FieldGrid& g, std::ostream& out, const std::string& comment = {});

// Lattice header: n1,n2,v1..vd.
LatticeField lattice_from_table(const CsvTable& t);
LatticeField read_lattice_csv(const std::string& path);
void write_lattice_csv(const LatticeField& lat, const std::string& path, const std::string& comment = {});
void write_lattice_csv(const LatticeField& lat, std::ostream& out, const std::string& comment = {});

// Dispatches on the header: n1 -> lattice, otherwise grid.
std::variant<FieldGrid, LatticeField> read_field(const std::string& path);

}  // namespace plm
