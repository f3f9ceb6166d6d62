#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trag::util {

/// Little-endian binary writer with a magic + version header.
class BinaryWriter {
 public:
  BinaryWriter(std::string_view magic, std::uint32_t version);

  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void doubles(std::span<const double> v);

  const std::string& bytes() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  /// Validates magic and version; throws FormatError otherwise.
  BinaryReader(std::string bytes, std::string_view magic, std::uint32_t version);
  static BinaryReader open(const std::filesystem::path& path, std::string_view magic,
                           std::uint32_t version);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  void doubles(std::span<double> out);
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace trag::util
