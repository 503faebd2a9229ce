#pragma once

// Little-endian encode/decode helpers shared by every on-disk and wire format.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void i64(std::int64_t v) { put(v); }
  void f32(float v) { put(v); }
  void f64(double v) { put(v); }
  void raw(std::string_view bytes) { buf_.append(bytes); }
  // u32 length prefix followed by the bytes.
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
  }

  std::size_t size() const noexcept { return buf_.size(); }
  const std::string& data() const noexcept { return buf_; }
  std::string take() { return std::move(buf_); }

  // Overwrite a previously written u32/u64 at `offset`.
  void patch_u32(std::size_t offset, std::uint32_t v) { std::memcpy(buf_.data() + offset, &v, 4); }
  void patch_u64(std::size_t offset, std::uint64_t v) { std::memcpy(buf_.data() + offset, &v, 8); }

 private:
  template <typename T>
  void put(T v) {
    char tmp[sizeof(T)];
    std::memcpy(tmp, &v, sizeof(T));
    buf_.append(tmp, sizeof(T));
  }

  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int64_t i64() { return get<std::int64_t>(); }
  float f32() { return get<float>(); }
  double f64() { return get<double>(); }

  std::string_view raw(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::string str() { return std::string(raw(u32())); }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) raise(ErrorCode::CorruptFile, "truncated record");
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace blobgraph
