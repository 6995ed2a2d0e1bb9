#ifndef HINV_BINARY_IO_HPP
#define HINV_BINARY_IO_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hinv/error.hpp"

namespace hinv::io {

std::uint32_t crc32(std::span<const std::byte> bytes);
std::uint32_t crc32(std::string_view text);

/// Little-endian append-only byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void put(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::byte*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::span<const std::byte> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }
  void put_doubles(std::span<const double> values) { put_bytes(std::as_bytes(values)); }

  // Appends [tag u32][count u64][payload][crc32 of payload].
  void put_block(std::uint32_t tag, std::span<const double> values);

  const std::vector<std::byte>& bytes() const { return bytes_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::byte> bytes_;
};

/// Bounds-checked reader over a byte buffer; every overrun throws FormatError.
class ByteReader {
 public:
  explicit ByteReader(std::vector<std::byte> bytes) : bytes_(std::move(bytes)) {}
  static ByteReader from_file(const std::filesystem::path& path);

  template <typename T>
  T get(std::string_view what) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    std::memcpy(&value, take(sizeof(T), what).data(), sizeof(T));
    return value;
  }
  std::span<const std::byte> take(std::size_t n, std::string_view what);
  std::vector<double> get_block(std::uint32_t expected_tag, std::string_view section);

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<std::byte> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t fourcc(const char (&s)[5]) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

/// SHA-free content fingerprint used in run manifests (CRC32 as hex).
std::string file_checksum(const std::filesystem::path& path);

}  // namespace hinv::io

#endif  // HINV_BINARY_IO_HPP
