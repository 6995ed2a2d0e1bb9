#include "hinv/binary_io.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include <zlib.h>

namespace hinv::io {

std::uint32_t crc32(std::span<const std::byte> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32(std::string_view text) {
  return crc32(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

void ByteWriter::put_block(std::uint32_t tag, std::span<const double> values) {
  put(tag);
  put(static_cast<std::uint64_t>(values.size()));
  put_doubles(values);
  put(crc32(std::as_bytes(values)));
}

void ByteWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw Error("failed writing " + path.string());
}

ByteReader ByteReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return ByteReader(std::move(bytes));
}

std::span<const std::byte> ByteReader::take(std::size_t n, std::string_view what) {
  if (n > remaining()) {
    throw FormatError("truncated file while reading " + std::string(what));
  }
  std::span<const std::byte> out(bytes_.data() + pos_, n);
  pos_ += n;
  return out;
}

std::vector<double> ByteReader::get_block(std::uint32_t expected_tag, std::string_view section) {
  const auto tag = get<std::uint32_t>(section);
  if (tag != expected_tag) throw FormatError("unexpected block tag in section " + std::string(section));
  const auto count = get<std::uint64_t>(section);
  if (count > remaining() / sizeof(double)) {
    throw FormatError("truncated file while reading " + std::string(section));
  }
  const auto payload = take(count * sizeof(double), section);
  const auto stored = get<std::uint32_t>(section);
  if (crc32(payload) != stored) throw FormatError("checksum mismatch in section " + std::string(section));
  std::vector<double> values(count);
  std::memcpy(values.data(), payload.data(), payload.size());
  return values;
}

std::string file_checksum(const std::filesystem::path& path) {
  auto reader = ByteReader::from_file(path);
  const auto all = reader.take(reader.remaining(), "checksum");
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc32(all));
  return buf;
}

}  // namespace hinv::io
