#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "phasent/camera.hpp"
#include "phasent/errors.hpp"
#include "phasent/frame_io.hpp"

using namespace phasent;

namespace {
FrameStack small_stack() {
  std::vector<std::uint8_t> dense(5 * 3 * 4, 0);
  for (std::size_t k = 0; k < dense.size(); k += 7) dense[k] = 1;
  return FrameStack::from_dense(5, 3, 16e-6, 4, dense);
}

std::uint64_t offset_of(std::span<const std::uint8_t> bytes) {
  try {
    decode_stack(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  return ~0ull;
}
}  // namespace

TEST_CASE("encode and decode round trip") {
  const FrameStack s = small_stack();
  const std::vector<std::uint8_t> bytes = encode_stack(s);
  REQUIRE(bytes.size() == 24 + 5 * 3 * 4);
  CHECK(std::memcmp(bytes.data(), "BPF1", 4) == 0);
  CHECK(bytes[4] == 5);
  CHECK(bytes[8] == 3);
  CHECK(bytes[12] == 4);
  CHECK(decode_stack(bytes) == s);
}

TEST_CASE("malformed input reports the failing offset") {
  std::vector<std::uint8_t> bytes = encode_stack(small_stack());

  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  CHECK(offset_of(bad) == 0);

  CHECK(offset_of(std::span(bytes).first(10)) == 10);
  CHECK(offset_of(std::span(bytes).first(bytes.size() - 1)) == bytes.size() - 1);

  bad = bytes;
  bad.push_back(0);
  CHECK(offset_of(bad) == bytes.size());

  bad = bytes;
  bad[24 + 9] = 2;
  CHECK(offset_of(bad) == 24 + 9);

  bad = bytes;
  std::memset(bad.data() + 4, 0, 4);
  CHECK(offset_of(bad) == 4);

  bad = bytes;
  const double neg = -1.0;
  std::memcpy(bad.data() + 16, &neg, 8);
  CHECK(offset_of(bad) == 16);
}

TEST_CASE("file round trip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "phasent_frame_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "stack.bpf";
  const FrameStack s = small_stack();
  write_stack(s, path);
  CHECK(read_stack(path) == s);
  CHECK_THROWS_AS(read_stack(dir / "missing.bpf"), IoError);
  CHECK_THROWS_AS(write_stack(s, dir / "no_such_dir" / "x.bpf"), IoError);
  CHECK_THROWS_AS(write_stack(FrameStack(5, 3, 16e-6, {0}, {}), path), DomainError);
  std::filesystem::remove_all(dir);
}
