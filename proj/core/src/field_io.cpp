#include "torusgas/field_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "torusgas/errors.hpp"

namespace torusgas {

void write_field_csv(const GridField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const auto& g = field.grid();
  out << "d,T,n\n" << g.dim() << ',' << std::setprecision(17) << g.side() << ',' << g.n() << '\n';
  for (double v : field.values()) out << v << '\n';
  if (!out) throw IoError("write failed for " + path);
}

GridField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("d,T,n", 0) != 0) throw IoError(path + ": missing 'd,T,n' header");
  std::getline(in, line);
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream hs(line);
  int d = 0, n = 0;
  double side = 0.0;
  if (!(hs >> d >> side >> n)) throw IoError(path + ": malformed header values");
  TorusGrid grid(d, n, side);
  std::vector<double> values;
  values.reserve(grid.size());
  double v;
  while (in >> v) values.push_back(v);
  if (values.size() != grid.size()) throw IoError(path + ": expected " + std::to_string(grid.size()) + " values");
  return GridField(grid, std::move(values));
}

void write_field_binary(const GridField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const auto& g = field.grid();
  const std::int32_t d = g.dim(), n = g.n();
  const double side = g.side();
  out.write("TGF1", 4);
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  out.write(reinterpret_cast<const char*>(&side), sizeof side);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(field.values().data()), static_cast<std::streamsize>(field.size() * sizeof(double)));
  if (!out) throw IoError("write failed for " + path);
}

GridField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  std::int32_t d = 0, n = 0;
  double side = 0.0;
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TGF1", 4) != 0) throw IoError(path + ": not a torusgas field file");
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  in.read(reinterpret_cast<char*>(&side), sizeof side);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  TorusGrid grid(d, n, side);
  std::vector<double> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw IoError(path + ": truncated field data");
  return GridField(grid, std::move(values));
}

GridField read_field(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return read_field_csv(path);
  return read_field_binary(path);
}

}  // namespace torusgas
