// Copyright 2026 The EDDA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EDDA_KEYVALUE_HPP_
#define EDDA_KEYVALUE_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace edda {

// `key = value` text file, written back in key order. Lines starting with
// '#' are comments.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile read(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
};

// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace edda

#endif  // EDDA_KEYVALUE_HPP_
