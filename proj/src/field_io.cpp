#include "kgm/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace kgm {

namespace {

nlohmann::json header_for(const Grid& g, FieldFormat format) {
  nlohmann::json h;
  h["lengths"] = g.lengths();
  h["counts"] = g.counts();
  h["format"] = (format == FieldFormat::csv) ? "csv" : "f64";
  return h;
}

ScalarField read_field_impl(const std::string& path, const GridPtr& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  std::string header_line;
  if (!std::getline(in, header_line))
    throw std::runtime_error("field file has no header: " + path);
  nlohmann::json h = nlohmann::json::parse(header_line);
  std::array<double, 3> lengths = h.at("lengths");
  std::array<int, 3> counts = h.at("counts");
  const std::string format = h.at("format");

  GridPtr grid = expected;
  if (grid) {
    if (grid->lengths() != lengths || grid->counts() != counts)
      throw std::runtime_error("field file header does not match grid: " + path);
  } else {
    grid = Grid::make(lengths, counts);
  }

  ScalarField f(grid);
  if (format == "csv") {
    for (std::size_t n = 0; n < f.size(); ++n) {
      if (!(in >> f[n]))
        throw std::runtime_error("field file truncated: " + path);
    }
  } else if (format == "f64") {
    in.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(f.size() * sizeof(double)))
      throw std::runtime_error("field file truncated: " + path);
  } else {
    throw std::runtime_error("unknown field format '" + format + "' in " + path);
  }
  return f;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f, FieldFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write field file: " + path);
  out << header_for(*f.grid(), format).dump() << "\n";
  if (format == FieldFormat::csv) {
    char buf[40];
    for (std::size_t n = 0; n < f.size(); ++n) {
      // 17 significant digits reproduce the double exactly on read.
      std::snprintf(buf, sizeof(buf), "%.17g", f[n]);
      out << buf << "\n";
    }
  } else {
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field(const std::string& path) { return read_field_impl(path, nullptr); }

ScalarField read_field(const std::string& path, const GridPtr& grid) {
  return read_field_impl(path, grid);
}

}  // namespace kgm
