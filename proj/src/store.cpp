// Copyright 2026 The Migrant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "migrant/store.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "migrant/error.hpp"

namespace migrant {
namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

void check_key(const std::string& part) {
  if (part.empty() || part.find("..") != std::string::npos || part.front() == '/') {
    throw Error(ErrorCode::kIoError, "invalid store key '" + part + "'");
  }
}

}  // namespace

void MemoryStore::put(const std::string& collection, const std::string& key,
                      const std::string& document) {
  std::lock_guard lock(mu_);
  docs_[{collection, key}] = document;
}

std::optional<std::string> MemoryStore::get(const std::string& collection,
                                            const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find({collection, key});
  if (it == docs_.end()) return std::nullopt;
  return it->second;
}

void MemoryStore::append_line(const std::string& collection, const std::string& key,
                              const std::string& line) {
  std::lock_guard lock(mu_);
  auto& doc = docs_[{collection, key}];
  doc += line;
  if (doc.empty() || doc.back() != '\n') doc.push_back('\n');
}

std::vector<std::string> MemoryStore::read_lines(const std::string& collection,
                                                 const std::string& key) const {
  auto doc = get(collection, key);
  return doc ? split_lines(*doc) : std::vector<std::string>{};
}

std::vector<std::string> MemoryStore::keys(const std::string& collection) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [k, v] : docs_) {
    if (k.first == collection) out.push_back(k.second);
  }
  return out;
}

FileStore::FileStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path FileStore::path_for(const std::string& collection,
                                          const std::string& key) const {
  check_key(collection);
  check_key(key);
  return root_ / collection / key;
}

void FileStore::put(const std::string& collection, const std::string& key,
                    const std::string& document) {
  const auto path = path_for(collection, key);
  std::lock_guard lock(mu_);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out << document;
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::string> FileStore::get(const std::string& collection,
                                          const std::string& key) const {
  const auto path = path_for(collection, key);
  std::lock_guard lock(mu_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void FileStore::append_line(const std::string& collection, const std::string& key,
                            const std::string& line) {
  const auto path = path_for(collection, key);
  std::lock_guard lock(mu_);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path.string());
  out << line;
  if (line.empty() || line.back() != '\n') out << '\n';
}

std::vector<std::string> FileStore::read_lines(const std::string& collection,
                                               const std::string& key) const {
  auto doc = get(collection, key);
  return doc ? split_lines(*doc) : std::vector<std::string>{};
}

std::vector<std::string> FileStore::keys(const std::string& collection) const {
  check_key(collection);
  std::vector<std::string> out;
  std::lock_guard lock(mu_);
  const auto dir = root_ / collection;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t SystemClock::now_ms() const {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace migrant
