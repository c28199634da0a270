#include "chemo/snapshot.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chemo {

void write_snapshot(const std::string& path, const ScalarField& u, const ScalarField& v) {
  const Grid& grid = u.grid();
  if (!(v.grid() == grid)) throw std::invalid_argument("snapshot fields live on different grids");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  out << (grid.dim() == 1 ? "x,u,v\n" : "x,y,u,v\n");
  out << std::setprecision(17);
  const Index ny = grid.dim() == 1 ? 1 : grid.cells(1);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < grid.cells(0); ++i) {
      const Index k = grid.index(i, j);
      out << grid.coordinate(0, i) << ',';
      if (grid.dim() == 2) out << grid.coordinate(1, j) << ',';
      out << u.values()[k] << ',' << v.values()[k] << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for snapshot '" + path + "'");
}

std::pair<ScalarField, ScalarField> read_snapshot(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  const std::size_t columns = grid.dim() == 1 ? 3 : 4;
  std::string line;
  std::getline(in, line);
  const std::string expected = grid.dim() == 1 ? "x,u,v" : "x,y,u,v";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw std::runtime_error(path + ": expected header '" + expected + "'");

  ArrayXd u(grid.size());
  ArrayXd v(grid.size());
  const Index ny = grid.dim() == 1 ? 1 : grid.cells(1);
  int lineno = 1;
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < grid.cells(0); ++i) {
      ++lineno;
      if (!std::getline(in, line)) throw std::runtime_error(path + ": too few rows for the grid");
      std::vector<double> row;
      std::stringstream ss(line);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          row.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number '" + item + "'");
        }
      }
      if (row.size() != columns) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong column count");
      const double tol = 1e-9 * grid.length(0);
      bool match = std::abs(row[0] - grid.coordinate(0, i)) <= tol;
      if (grid.dim() == 2) match = match && std::abs(row[1] - grid.coordinate(1, j)) <= 1e-9 * grid.length(1);
      if (!match) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": coordinates do not match the grid");
      const Index k = grid.index(i, j);
      u[k] = row[columns - 2];
      v[k] = row[columns - 1];
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") throw std::runtime_error(path + ": more rows than the grid has nodes");
  }
  return {ScalarField(grid, std::move(u)), ScalarField(grid, std::move(v))};
}

}  // namespace chemo
