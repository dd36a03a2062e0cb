// SPDX-License-Identifier: Apache-2.0
#include "curlrec/io.hpp"

#include <fstream>
#include <sstream>

namespace curlrec {

namespace {

struct LineReader {
  std::istream& is;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError("mesh input line " + std::to_string(line) + ": " + what);
  }

  std::istringstream next() {
    std::string text;
    while (std::getline(is, text)) {
      ++line;
      auto pos = text.find('#');
      if (pos != std::string::npos) text.erase(pos);
      if (text.find_first_not_of(" \t\r") != std::string::npos)
        return std::istringstream(text);
    }
    ++line;
    fail("unexpected end of input");
  }
};

}  // namespace

Mesh read_mesh(std::istream& is) {
  LineReader r{is};
  std::string kw;
  long n = 0;
  {
    auto ls = r.next();
    if (!(ls >> kw >> n) || kw != "vertices" || n < 3)
      r.fail("expected `vertices N` with N >= 3");
  }
  std::vector<Vec2> points(n);
  for (long i = 0; i < n; ++i) {
    auto ls = r.next();
    if (!(ls >> points[i].x() >> points[i].y()))
      r.fail("expected vertex coordinates `x y`");
  }
  long m = 0;
  {
    auto ls = r.next();
    if (!(ls >> kw >> m) || kw != "cells" || m < 1)
      r.fail("expected `cells M` with M >= 1");
  }
  std::vector<std::array<int, 3>> cells(m);
  for (long i = 0; i < m; ++i) {
    auto ls = r.next();
    if (!(ls >> cells[i][0] >> cells[i][1] >> cells[i][2]))
      r.fail("expected cell connectivity `i j k`");
    for (int v : cells[i])
      if (v < 0 || v >= n) r.fail("vertex index out of range");
  }
  return build_mesh(points, cells);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MeshError("cannot open mesh file: " + path);
  return read_mesh(f);
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  os << "vertices " << mesh.num_vertices() << '\n';
  for (const Vec2& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  os << "cells " << mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
}

}  // namespace curlrec
