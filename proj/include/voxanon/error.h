// voxanon/error.h

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

#ifndef VOXANON_ERROR_H_
#define VOXANON_ERROR_H_

#include <stdexcept>
#include <string>

namespace voxanon {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed bytes or text: bad magic, bad header, wrong field count.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input with the wrong structure: dtype, rank, dimension, labels.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input with invalid values: non-finite, zero norm, duplicates.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Requested more items than a container holds (k > M, K > M).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class MissingOutputError : public Error {
 public:
  MissingOutputError(std::string utterance_id, std::string backend_id)
      : Error("missing output for utterance '" + utterance_id +
              "' in backend '" + backend_id + "'"),
        utterance_id_(std::move(utterance_id)),
        backend_id_(std::move(backend_id)) {}

  const std::string &utterance_id() const { return utterance_id_; }
  const std::string &backend_id() const { return backend_id_; }

 private:
  std::string utterance_id_;
  std::string backend_id_;
};

}  // namespace voxanon

#endif  // VOXANON_ERROR_H_
