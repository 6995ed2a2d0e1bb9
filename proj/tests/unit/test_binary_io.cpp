#include <doctest.h>

#include <vector>

#include "hinv/binary_io.hpp"
#include "hinv/error.hpp"
#include "support.hpp"

using namespace hinv;

TEST_CASE("crc32 check value") {
  CHECK(io::crc32(std::string_view("123456789")) == 0xCBF43926u);
  CHECK(io::crc32(std::string_view("")) == 0u);
}

TEST_CASE("blocks round trip and detect damage") {
  const std::vector<double> values{1.5, -2.25, 1e-300, 3.0};
  io::ByteWriter w;
  w.put<std::uint16_t>(7);
  w.put_block(io::fourcc("TEST"), values);

  io::ByteReader r(w.bytes());
  CHECK(r.get<std::uint16_t>("prefix") == 7);
  CHECK(r.get_block(io::fourcc("TEST"), "test block") == values);
  CHECK(r.remaining() == 0);

  auto damaged = w.bytes();
  damaged[2 + 4 + 8 + 3] ^= std::byte{1};
  io::ByteReader bad(damaged);
  bad.get<std::uint16_t>("prefix");
  CHECK_THROWS_WITH_AS(bad.get_block(io::fourcc("TEST"), "test block"), "checksum mismatch in section test block",
                       FormatError);

  auto cut = w.bytes();
  cut.resize(cut.size() - 6);
  io::ByteReader shortr(cut);
  shortr.get<std::uint16_t>("prefix");
  CHECK_THROWS_AS(shortr.get_block(io::fourcc("TEST"), "test block"), FormatError);

  io::ByteReader wrong(w.bytes());
  wrong.get<std::uint16_t>("prefix");
  CHECK_THROWS_AS(wrong.get_block(io::fourcc("NOPE"), "test block"), FormatError);
}

TEST_CASE("file checksum") {
  test::TempDir dir("io");
  io::ByteWriter w;
  for (char c : std::string("123456789")) w.put(c);
  w.write_file(dir / "x.bin");
  CHECK(io::file_checksum(dir / "x.bin") == "cbf43926");
  CHECK(io::ByteReader::from_file(dir / "x.bin").remaining() == 9);
  CHECK_THROWS_AS(io::ByteReader::from_file(dir / "absent.bin"), Error);
}
