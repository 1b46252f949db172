#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "shockshift/grid.hpp"

namespace shockshift {

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap64(v);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& f, const std::string& name, double t) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  const Grid& g = f.grid;
  std::ostringstream header;
  header.precision(17);
  header << "shockshift-field name=" << name << " t=" << t << " N=" << g.dim << " L=" << g.L << " n1=" << g.n1
         << " n_perp=" << g.n_perp << "\n";
  out << header.str();
  for (double v : f.values) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ScalarField read_snapshot(const std::string& path, std::string* name, double* t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  std::string magic;
  hs >> magic;
  if (magic != "shockshift-field") throw std::runtime_error(path + ": not a field snapshot");
  std::string tok, nm;
  double tt = 0.0, L = 0.0;
  int dim = 0, n1 = 0, np = 0;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "name") nm = val;
    else if (key == "t") tt = std::stod(val);
    else if (key == "N") dim = std::stoi(val);
    else if (key == "L") L = std::stod(val);
    else if (key == "n1") n1 = std::stoi(val);
    else if (key == "n_perp") np = std::stoi(val);
  }
  ScalarField f(Grid::make(dim, L, n1, np));
  for (auto& v : f.values) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if (!in) throw std::runtime_error(path + ": truncated snapshot");
    v = std::bit_cast<double>(to_le(bits));
  }
  if (name) *name = nm;
  if (t) *t = tt;
  return f;
}

void write_field_csv(const std::string& path, const ScalarField& f, std::size_t max_nodes) {
  if (f.size() > max_nodes) {
    throw std::runtime_error("refusing CSV export of " + std::to_string(f.size()) + " nodes (limit " +
                             std::to_string(max_nodes) + ")");
  }
  auto out = open_out(path);
  out.precision(17);
  const Grid& g = f.grid;
  const std::size_t S = g.slice();
  out << (g.dim == 2 ? "x1,x2,value\n" : "x1,x2,x3,value\n");
  for (int i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      out << g.x1(i) << ',';
      if (g.dim == 2) {
        out << g.x_perp(int(j));
      } else {
        out << g.x_perp(int(j / std::size_t(g.n_perp))) << ',' << g.x_perp(int(j % std::size_t(g.n_perp)));
      }
      out << ',' << f[i * S + j] << '\n';
    }
  }
}

}  // namespace shockshift
