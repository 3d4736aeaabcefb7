#include "phaseflow/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "phaseflow/errors.hpp"

namespace phaseflow {
namespace {

constexpr char kMagic[4] = {'P', 'H', 'F', '1'};

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void put_double(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_double(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError(path.string() + ": truncated binary field");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void write_payload(std::ostream& out, const std::vector<double>& u, const std::vector<NodeState>& mask) {
  for (double v : u) put_double(out, v);
  for (NodeState s : mask) put_double(out, s == NodeState::Fixed ? 1.0 : 0.0);
}

std::vector<double> read_header(std::istream& in, const std::filesystem::path& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path.string() + ": not a PHF1 field file");
  }
  std::vector<double> h(10);
  for (double& v : h) v = get_double(in, path);
  return h;
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_field_csv(const std::filesystem::path& path, const Field1D& f, const std::string& comment) {
  auto out = open_out(path);
  if (!comment.empty()) out << "# " << comment << "\r\n";
  out << "t,u\r\n";
  for (std::size_t i = 0; i < f.u.size(); ++i) out << format_double(f.grid.x(i)) << ',' << format_double(f.u[i]) << "\r\n";
  if (!out) throw IoError("write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const Field2D& f, const std::string& comment) {
  auto out = open_out(path);
  if (!comment.empty()) out << "# " << comment << "\r\n";
  out << "x,y,u\r\n";
  for (std::size_t j = 0; j < f.grid.nt(); ++j) {
    for (std::size_t i = 0; i < f.grid.ns(); ++i) {
      const auto p = f.grid.point(i, j);
      out << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(f.u[f.grid.index(i, j)])
          << "\r\n";
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Field1D read_field_csv(const std::filesystem::path& path, const Grid1D& grid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Field1D f = Field1D::constant(grid, 0.0);
  std::string line;
  bool header = false;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,u") throw IoError(path.string() + ": expected header 't,u'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || i >= f.u.size()) throw IoError(path.string() + ": malformed field CSV");
    f.u[i++] = std::stod(line.substr(comma + 1));
  }
  if (i != f.u.size()) throw IoError(path.string() + ": node count does not match the grid");
  return f;
}

void write_field_binary(const std::filesystem::path& path, const Field1D& f) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic, 4);
  for (double v : {1.0, f.grid.a, f.grid.b, 0.0, 0.0, 0.0, 0.0, static_cast<double>(f.grid.n), f.grid.h(), 0.0})
    put_double(out, v);
  write_payload(out, f.u, f.mask);
  if (!out) throw IoError("write failed for " + path.string());
}

void write_field_binary(const std::filesystem::path& path, const Field2D& f) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic, 4);
  const auto& g = f.grid;
  for (double v : {2.0, g.center[0], g.center[1], g.normal[0], g.normal[1], g.tangent[0], g.tangent[1],
                   static_cast<double>(g.cells), g.h(), g.periodic_tangent ? 1.0 : 0.0})
    put_double(out, v);
  write_payload(out, f.u, f.mask);
  if (!out) throw IoError("write failed for " + path.string());
}

Field1D read_field_binary_1d(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const auto h = read_header(in, path);
  if (h[0] != 1.0) throw IoError(path.string() + ": not a 1D field");
  Grid1D g{h[1], h[2], static_cast<std::size_t>(h[7])};
  Field1D f = Field1D::constant(g, 0.0);
  for (double& v : f.u) v = get_double(in, path);
  for (auto& s : f.mask) s = get_double(in, path) != 0.0 ? NodeState::Fixed : NodeState::Free;
  return f;
}

Field2D read_field_binary_2d(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const auto h = read_header(in, path);
  if (h[0] != 2.0) throw IoError(path.string() + ": not a 2D field");
  Grid2D g;
  g.center = {h[1], h[2]};
  g.normal = {h[3], h[4]};
  g.tangent = {h[5], h[6]};
  g.cells = static_cast<std::size_t>(h[7]);
  g.side = h[8] * static_cast<double>(g.cells);
  g.periodic_tangent = h[9] != 0.0;
  Field2D f = Field2D::constant(g, 0.0);
  for (double& v : f.u) v = get_double(in, path);
  for (auto& s : f.mask) s = get_double(in, path) != 0.0 ? NodeState::Fixed : NodeState::Free;
  return f;
}

}  // namespace phaseflow
