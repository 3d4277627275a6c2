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

#ifndef MIGRANT_STORE_HPP
#define MIGRANT_STORE_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace migrant {

// Document store keyed by (collection, key). Documents are opaque strings;
// logs are append-only sequences of lines.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual void put(const std::string& collection, const std::string& key,
                   const std::string& document) = 0;
  virtual std::optional<std::string> get(const std::string& collection,
                                         const std::string& key) const = 0;
  virtual void append_line(const std::string& collection, const std::string& key,
                           const std::string& line) = 0;
  virtual std::vector<std::string> read_lines(const std::string& collection,
                                              const std::string& key) const = 0;
  // Sorted keys of a collection.
  virtual std::vector<std::string> keys(const std::string& collection) const = 0;
};

class MemoryStore : public DocumentStore {
 public:
  void put(const std::string& collection, const std::string& key,
           const std::string& document) override;
  std::optional<std::string> get(const std::string& collection,
                                 const std::string& key) const override;
  void append_line(const std::string& collection, const std::string& key,
                   const std::string& line) override;
  std::vector<std::string> read_lines(const std::string& collection,
                                      const std::string& key) const override;
  std::vector<std::string> keys(const std::string& collection) const override;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::string> docs_;
};

// Maps (collection, key) to root/collection/key.
class FileStore : public DocumentStore {
 public:
  explicit FileStore(std::filesystem::path root);

  void put(const std::string& collection, const std::string& key,
           const std::string& document) override;
  std::optional<std::string> get(const std::string& collection,
                                 const std::string& key) const override;
  void append_line(const std::string& collection, const std::string& key,
                   const std::string& line) override;
  std::vector<std::string> read_lines(const std::string& collection,
                                      const std::string& key) const override;
  std::vector<std::string> keys(const std::string& collection) const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& collection, const std::string& key) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() const override;
};

// Only moves when told to; simulations use one per session.
class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() const override { return now_.load(); }
  void advance(std::int64_t ms) { now_ += ms; }
  void set(std::int64_t ms) { now_ = ms; }

 private:
  std::atomic<std::int64_t> now_;
};

}  // namespace migrant

#endif  // MIGRANT_STORE_HPP
