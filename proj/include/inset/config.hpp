// Copyright 2026 The INSET Authors. All Rights Reserved.
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


// Flat key=value run configuration. Every key has a default, a config file
// may override any subset, and command-line flags override both.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace inset {

class RunConfig {
 public:
  struct Key {
    std::string name;
    std::string default_value;
    std::string help;
  };

  /// All recognised keys in dump order.
  static const std::vector<Key>& keys();

  RunConfig();

  /// UsageError for unknown keys.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  /// File path for `key`; an empty value resolves to the default file name
  /// inside work_dir.
  std::string path(const std::string& key) const;

  /// Lines of key=value; '#' starts a comment line.
  void load_file(const std::string& file);
  /// Every key with its current value, one per line.
  std::string dump() const;

  /// Range checks (probabilities in [0, 1], beam width >= 1, ...).
  void validate() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace inset
