// SPDX-License-Identifier: Apache-2.0
#pragma once

// Little-endian helpers shared by the RVR1 / RVF1 / RVNN containers:
//   magic[4] | u32 header_len | header JSON | payload arrays

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/errors.hpp"

namespace radarppg::io {

static_assert(std::endian::native == std::endian::little,
              "container IO assumes a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }

  void write_header(const char (&magic)[5], const nlohmann::json& header) {
    out_.write(magic, 4);
    const std::string text = header.dump();
    write_u32(static_cast<std::uint32_t>(text.size()));
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  }

  void write_u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

  void write_f32(std::span<const float> values) {
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size_bytes()));
  }

  template <typename T>
  void write_f32_from(std::span<const T> values) {
    std::vector<float> buf(values.begin(), values.end());
    write_f32(buf);
  }

  void close() {
    out_.flush();
    if (!out_) throw std::runtime_error("write to '" + path_ + "' failed");
    out_.close();
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'", 0);
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  std::uint64_t size() const noexcept { return data_.size(); }
  std::uint64_t offset() const noexcept { return pos_; }

  nlohmann::json read_header(const char (&magic)[5]) {
    need(4, "magic");
    if (std::memcmp(data_.data(), magic, 4) != 0) {
      throw FormatError(std::string("bad magic: expected \"") + magic + "\"", 0);
    }
    pos_ = 4;
    const std::uint32_t len = read_u32();
    need(len, "header");
    try {
      auto header = nlohmann::json::parse(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                          data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
      pos_ += len;
      return header;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed header JSON: ") + e.what(), pos_);
    }
  }

  std::uint32_t read_u32() {
    need(4, "u32");
    std::uint32_t v;
    std::memcpy(&v, data_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }

  std::vector<float> read_f32(std::uint64_t count, const char* what) {
    need(count * 4, what);
    std::vector<float> v(count);
    std::memcpy(v.data(), data_.data() + pos_, count * 4);
    pos_ += count * 4;
    return v;
  }

  void expect_end() const {
    if (pos_ != data_.size()) {
      throw FormatError("trailing bytes after payload (" + std::to_string(data_.size() - pos_) + ")", pos_);
    }
  }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (pos_ + n > data_.size()) {
      throw FormatError(std::string("truncated file reading ") + what + ": need " + std::to_string(n) +
                            " bytes, " + std::to_string(data_.size() - pos_) + " left",
                        pos_);
    }
  }

  std::vector<char> data_;
  std::uint64_t pos_ = 0;
};

/// Fetches a required header field, reporting the header offset on failure.
template <typename T>
T header_field(const nlohmann::json& header, const char* key) {
  try {
    return header.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("header field '") + key + "' missing or mistyped", 8);
  }
}

}  // namespace radarppg::io
