/*
 * Copyright 2026 The voxscreen Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOXSCREEN_BINARY_IO_HPP_
#define VOXSCREEN_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxscreen/error.hpp"

namespace voxscreen {

// Little-endian writer for the VX* containers.
class ByteWriter {
 public:
  void Magic(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void String(std::string_view s) {
    U32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  template <typename T>
  void FloatArray(std::span<const T> values) {
    U32(static_cast<std::uint32_t>(values.size()));
    for (T v : values) F32(static_cast<float>(v));
  }

  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void ExpectMagic(std::string_view tag) {
    Need(tag.size());
    if (std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) != 0) {
      throw Error(ErrorCode::kMalformedFile, "bad magic, expected " + std::string(tag));
    }
    pos_ += tag.size();
  }
  std::uint8_t U8() {
    Need(1);
    return bytes_[pos_++];
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::string String() {
    const std::uint32_t n = U32();
    Need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> FloatArray() {
    const std::uint32_t n = U32();
    Need(static_cast<std::size_t>(n) * 4);
    std::vector<double> out(n);
    for (auto& v : out) v = F32();
    return out;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kMalformedFile, "truncated container");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace voxscreen

#endif  // VOXSCREEN_BINARY_IO_HPP_
