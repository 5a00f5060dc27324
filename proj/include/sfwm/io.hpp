#pragma once

#include <bit>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sfwm {

inline std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

inline std::ifstream open_input(const std::string& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return is;
}

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "binary writers assume a little-endian host");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("truncated binary file");
  return value;
}

}  // namespace sfwm
