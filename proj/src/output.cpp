#include "biofilm/output.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "biofilm/errors.hpp"

namespace biofilm {

void write_vtk(const std::string& path, const std::vector<VtkArray>& arrays, const std::string& title) {
  if (arrays.empty()) throw ContractError("write_vtk: no arrays");
  const Layout& layout = arrays.front().field->layout();
  const GridSpec& g = layout.grid();
  std::vector<std::vector<double>> globals;
  for (const auto& a : arrays) globals.push_back(gather_global(*a.field, 0));

  bool failed = false;
  if (layout.rank() == 0) {
    std::ofstream out(path);
    if (out) {
      const int nxu = g.unique_nx();
      out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
      out << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n";
      out << "ORIGIN 0 0 0\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "SPACING %.17g %.17g 1\n", g.dx, g.dy);
      out << buf;
      out << "POINT_DATA " << static_cast<long long>(g.nx) * g.ny << '\n';
      for (std::size_t k = 0; k < arrays.size(); ++k) {
        out << "SCALARS " << arrays[k].name << " double 1\nLOOKUP_TABLE default\n";
        for (int j = 0; j < g.ny; ++j) {
          for (int i = 0; i < g.nx; ++i) {
            const double v = globals[k][static_cast<std::size_t>(j) * nxu + (i % nxu)] * arrays[k].scale;
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << (i + 1 == g.nx ? '\n' : ' ');
          }
        }
      }
      out.flush();
    }
    failed = !out;
  }
  if (layout.comm().any(failed)) throw IoError("cannot write '" + path + "'");
}

VtkData read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  VtkData d;
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw IoError(path + ": not a legacy VTK file");
  std::getline(in, line);  // title
  std::string word;
  long long points = -1;
  while (in >> word) {
    if (word == "ASCII" || word == "DATASET" || word == "STRUCTURED_POINTS") continue;
    if (word == "DIMENSIONS") {
      in >> d.nx >> d.ny >> d.nz;
    } else if (word == "ORIGIN") {
      double x, y, z;
      in >> x >> y >> z;
    } else if (word == "SPACING") {
      double z;
      in >> d.dx >> d.dy >> z;
    } else if (word == "POINT_DATA") {
      in >> points;
    } else if (word == "SCALARS") {
      std::string name, type;
      int comps = 1;
      in >> name >> type >> comps;
      std::string lt, table;
      in >> lt >> table;
      if (lt != "LOOKUP_TABLE" || points < 0) throw IoError(path + ": malformed SCALARS block");
      std::vector<double> values(static_cast<std::size_t>(points));
      for (double& v : values) {
        if (!(in >> v)) throw IoError(path + ": truncated array '" + name + "'");
      }
      d.arrays[name] = std::move(values);
    } else {
      throw IoError(path + ": unexpected token '" + word + "'");
    }
  }
  return d;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot write '" + path + "'");
  out_ << header << '\n';
  out_.flush();
}

void CsvWriter::row(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoError("write to '" + path_ + "' failed");
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir + "'");
  }
}

}  // namespace biofilm
