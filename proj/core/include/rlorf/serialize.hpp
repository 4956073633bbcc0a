#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "rlorf/rng.hpp"

namespace rlorf {

// Raw little-endian host-order binary stream used by forest and agent snapshots.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void write(T value) {
    os_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  void write_string(const std::string& s) {
    write<std::uint64_t>(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void write_rng(const Rng& rng) {
    std::ostringstream state;
    state << rng;
    write_string(state.str());
  }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is) : is_(is) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T read() {
    T value{};
    is_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is_) throw std::runtime_error("snapshot truncated");
    return value;
  }

  std::string read_string() {
    const auto size = read<std::uint64_t>();
    if (size > (std::uint64_t{1} << 32)) throw std::runtime_error("snapshot corrupt: string length");
    std::string s(size, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(size));
    if (!is_) throw std::runtime_error("snapshot truncated");
    return s;
  }

  Rng read_rng() {
    std::istringstream state(read_string());
    Rng rng;
    state >> rng;
    if (!state) throw std::runtime_error("snapshot corrupt: rng state");
    return rng;
  }

  void expect_tag(std::uint32_t tag, const char* what) {
    if (read<std::uint32_t>() != tag) throw std::runtime_error(std::string("snapshot corrupt: expected ") + what);
  }

 private:
  std::istream& is_;
};

}  // namespace rlorf
