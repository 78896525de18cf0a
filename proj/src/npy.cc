// npy.cc

// Copyright 2026  The voxanon Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voxanon/npy.h"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "voxanon/error.h"

namespace voxanon {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read without byte swapping");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kPreludeLen = kMagicLen + 2 + 2;
constexpr std::size_t kAlign = 64;

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::size_t> ParseShape(const std::string &text) {
  std::vector<std::size_t> shape;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = Trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) {
      if (comma == text.size() || Trim(text.substr(pos)).empty()) break;
      throw FormatError("npy: empty shape entry");
    }
    std::size_t v = 0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw FormatError("npy: bad shape entry '" + item + "'");
    shape.push_back(v);
  }
  return shape;
}

}  // namespace

NpyArray ParseNpy(const std::string &bytes) {
  if (bytes.size() < kPreludeLen ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
    throw FormatError("npy: bad magic");
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0)
    throw FormatError("npy: unsupported version " + std::to_string(major) +
                      "." + std::to_string(minor));
  const std::size_t header_len =
      static_cast<unsigned char>(bytes[8]) |
      (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < kPreludeLen + header_len)
    throw FormatError("npy: truncated header");

  const std::string header = Trim(bytes.substr(kPreludeLen, header_len));
  if (header.size() < 2 || header.front() != '{' || header.back() != '}')
    throw FormatError("npy: header is not a dict literal");

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch descr, order, shape;
  if (!std::regex_search(header, descr, descr_re) ||
      !std::regex_search(header, order, order_re) ||
      !std::regex_search(header, shape, shape_re))
    throw FormatError("npy: header missing descr, fortran_order or shape");

  if (descr[1] != "<f4")
    throw SchemaError("npy: dtype '" + descr[1].str() + "' is not <f4");
  if (order[1] == "True") throw SchemaError("npy: fortran_order not supported");

  NpyArray out;
  out.shape = ParseShape(shape[1].str());
  std::size_t count = 1;
  for (auto d : out.shape) count *= d;

  const std::size_t offset = kPreludeLen + header_len;
  if (bytes.size() - offset != count * sizeof(float))
    throw FormatError("npy: payload holds " +
                      std::to_string(bytes.size() - offset) +
                      " bytes, expected " + std::to_string(count * 4));
  out.data.resize(count);
  if (count > 0) std::memcpy(out.data.data(), bytes.data() + offset, count * 4);
  return out;
}

std::string SerializeNpy(std::span<const std::size_t> shape,
                         std::span<const float> data) {
  std::ostringstream dict;
  dict << "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict << shape[i];
    if (shape.size() == 1 || i + 1 < shape.size()) dict << ",";
    if (i + 1 < shape.size()) dict << " ";
  }
  dict << "), }";
  std::string header = dict.str();
  const std::size_t unpadded = kPreludeLen + header.size() + 1;
  header.append((kAlign - unpadded % kAlign) % kAlign, ' ');
  header.push_back('\n');

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out += header;
  out.append(reinterpret_cast<const char *>(data.data()), data.size_bytes());
  return out;
}

NpyArray ReadNpy(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  try {
    return ParseNpy(bytes);
  } catch (const Error &e) {
    // Keep the error category, add the file name.
    if (dynamic_cast<const SchemaError *>(&e))
      throw SchemaError(path.string() + ": " + e.what());
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteNpy(const std::filesystem::path &path,
              std::span<const std::size_t> shape, std::span<const float> data) {
  const std::string bytes = SerializeNpy(shape, data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace voxanon
