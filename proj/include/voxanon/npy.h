// voxanon/npy.h

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

#ifndef VOXANON_NPY_H_
#define VOXANON_NPY_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace voxanon {

// A little-endian float32, C-order NPY v1.0 array.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

// Parses an in-memory NPY v1.0 image. Only '<f4', C-order is accepted.
// Throws FormatError on a malformed container, SchemaError on an unsupported
// dtype or layout.
NpyArray ParseNpy(const std::string &bytes);

std::string SerializeNpy(std::span<const std::size_t> shape,
                         std::span<const float> data);

NpyArray ReadNpy(const std::filesystem::path &path);

void WriteNpy(const std::filesystem::path &path,
              std::span<const std::size_t> shape, std::span<const float> data);

}  // namespace voxanon

#endif  // VOXANON_NPY_H_
