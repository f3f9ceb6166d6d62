#include "trag/util/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trag/errors.hpp"

namespace trag::util {

static_assert(std::endian::native == std::endian::little, "persisted formats assume little-endian hosts");

namespace {

template <typename T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

}  // namespace

BinaryWriter::BinaryWriter(std::string_view magic, std::uint32_t version) {
  buf_.append(magic);
  u32(version);
}

void BinaryWriter::u8(std::uint8_t v) { put(buf_, v); }
void BinaryWriter::u32(std::uint32_t v) { put(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put(buf_, v); }
void BinaryWriter::f64(double v) { put(buf_, v); }

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.append(s);
}

void BinaryWriter::doubles(std::span<const double> v) {
  buf_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes());
}

void BinaryWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

BinaryReader::BinaryReader(std::string bytes, std::string_view magic, std::uint32_t version)
    : buf_(std::move(bytes)) {
  need(magic.size());
  if (std::string_view(buf_).substr(0, magic.size()) != magic) {
    throw FormatError("bad magic, expected " + std::string(magic));
  }
  pos_ = magic.size();
  const auto v = u32();
  if (v != version) {
    throw FormatError("unsupported " + std::string(magic) + " version " + std::to_string(v));
  }
}

BinaryReader BinaryReader::open(const std::filesystem::path& path, std::string_view magic,
                                std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return BinaryReader(std::move(ss).str(), magic, version);
}

void BinaryReader::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw FormatError("truncated index file");
}

template <typename T>
static T take(const std::string& buf, std::size_t& pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::uint8_t BinaryReader::u8() {
  need(1);
  return take<std::uint8_t>(buf_, pos_);
}
std::uint32_t BinaryReader::u32() {
  need(4);
  return take<std::uint32_t>(buf_, pos_);
}
std::uint64_t BinaryReader::u64() {
  need(8);
  return take<std::uint64_t>(buf_, pos_);
}
double BinaryReader::f64() {
  need(8);
  return take<double>(buf_, pos_);
}

std::string BinaryReader::str() {
  const auto n = u32();
  need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

void BinaryReader::doubles(std::span<double> out) {
  need(out.size_bytes());
  std::memcpy(out.data(), buf_.data() + pos_, out.size_bytes());
  pos_ += out.size_bytes();
}

}  // namespace trag::util
