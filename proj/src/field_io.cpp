#include <fstream>
#include <iomanip>

#include "hinv/field.hpp"

// Binary field layout (little endian):
//   "HFLD" u16 version
//   grid descriptor (see io::put_grid)
//   block "DATA": u64 count, count f64 values (x index fastest), u32 crc32

namespace hinv {

namespace {
constexpr std::uint32_t kFieldMagic = io::fourcc("HFLD");
constexpr std::uint32_t kDataTag = io::fourcc("DATA");
constexpr std::uint16_t kFieldVersion = 1;
}  // namespace

namespace io {

void put_grid(ByteWriter& out, const Grid& grid) {
  out.put(static_cast<std::uint8_t>(grid.dimension()));
  for (int a = 0; a < 2; ++a) out.put(static_cast<std::uint32_t>(grid.nodes(a)));
  for (int a = 0; a < 2; ++a) out.put(grid.extent().lower[a]);
  for (int a = 0; a < 2; ++a) out.put(grid.extent().upper[a]);
}

Grid get_grid(ByteReader& in) {
  Box extent;
  extent.dim = in.get<std::uint8_t>("grid descriptor");
  if (extent.dim != 1 && extent.dim != 2) throw FormatError("invalid grid dimension in grid descriptor");
  std::array<int, 2> nodes{};
  for (int a = 0; a < 2; ++a) nodes[a] = static_cast<int>(in.get<std::uint32_t>("grid descriptor"));
  for (int a = 0; a < 2; ++a) extent.lower[a] = in.get<double>("grid descriptor");
  for (int a = 0; a < 2; ++a) extent.upper[a] = in.get<double>("grid descriptor");
  try {
    return Grid(extent, nodes);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid grid descriptor: ") + e.what());
  }
}

}  // namespace io

void write_field_csv(const std::filesystem::path& path, const Field& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const Grid& g = field.grid();
  out << (g.dimension() == 1 ? "index,x,value\n" : "index,x,y,value\n");
  out << std::setprecision(17);
  for (Index n = 0; n < g.node_count(); ++n) {
    out << n << ',' << g.coordinate(n, 0) << ',';
    if (g.dimension() == 2) out << g.coordinate(n, 1) << ',';
    out << field[n] << '\n';
  }
}

void write_field_binary(const std::filesystem::path& path, const Field& field) {
  io::ByteWriter out;
  out.put(kFieldMagic);
  out.put(kFieldVersion);
  io::put_grid(out, field.grid());
  out.put_block(kDataTag, std::span<const double>(field.values().data(), field.size()));
  out.write_file(path);
}

Field read_field_binary(const std::filesystem::path& path) {
  auto in = io::ByteReader::from_file(path);
  if (in.get<std::uint32_t>("magic") != kFieldMagic) throw FormatError("not a field file: " + path.string());
  if (in.get<std::uint16_t>("version") != kFieldVersion) throw FormatError("unsupported field file version");
  auto grid = std::make_shared<const Grid>(io::get_grid(in));
  const auto values = in.get_block(kDataTag, "field data");
  if (static_cast<Index>(values.size()) != grid->node_count())
    throw FormatError("field data length differs from the grid node count");
  return Field(grid, Eigen::Map<const Eigen::VectorXd>(values.data(), grid->node_count()));
}

}  // namespace hinv
