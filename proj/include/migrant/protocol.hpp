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

#ifndef MIGRANT_PROTOCOL_HPP
#define MIGRANT_PROTOCOL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace migrant {

// Payloads and documents keep insertion order so that encoding is canonical.
using Json = nlohmann::ordered_json;

enum class MsgType {
  kRegister,
  kWake,
  kUtterance,
  kAgentSay,
  kMigrateRequest,
  kMigratePayload,
  kMigrateAck,
  kContextSync,
  kGameMove,
  kGameResult,
  kError,
};

inline constexpr MsgType kAllMsgTypes[] = {
    MsgType::kRegister,       MsgType::kWake,           MsgType::kUtterance,
    MsgType::kAgentSay,       MsgType::kMigrateRequest, MsgType::kMigratePayload,
    MsgType::kMigrateAck,     MsgType::kContextSync,    MsgType::kGameMove,
    MsgType::kGameResult,     MsgType::kError,
};

std::string_view to_string(MsgType type);
std::optional<MsgType> parse_msg_type(std::string_view name);

struct Envelope {
  MsgType msg_type = MsgType::kError;
  std::string session_id;
  std::string embodiment_id;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  Json payload = Json::object();

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// One newline-terminated JSON object with keys in the order msg_type,
// session_id, embodiment_id, seq, timestamp_ms, payload.
std::string encode(const Envelope& env);

// Accepts a frame with or without its trailing newline. Throws Error with
// kMalformedFrame, kUnknownType or kSchemaViolation.
Envelope decode(std::string_view frame);

// Index of the first envelope whose seq does not exceed its predecessor's.
std::optional<std::size_t> check_ordering(std::span<const Envelope> frames);

// Incremental splitter for a byte stream of concatenated frames.
class FrameReader {
 public:
  void feed(std::string_view bytes);
  // Next complete frame, decoded; nullopt when no full line is buffered.
  std::optional<Envelope> next();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

std::vector<Envelope> decode_stream(std::string_view bytes);

// Stamps seq and timestamps for one (session, embodiment) connection.
class Sequencer {
 public:
  Sequencer(std::string session_id, std::string embodiment_id)
      : session_id_(std::move(session_id)),
        embodiment_id_(std::move(embodiment_id)) {}

  Envelope make(MsgType type, Json payload, std::int64_t timestamp_ms);

 private:
  std::string session_id_;
  std::string embodiment_id_;
  std::uint64_t next_seq_ = 1;
};

// ---------------------------------------------------------------------------
// Records carried inside payloads.

struct IdentityRecord {
  std::string identity_id;
  std::string visual_asset_id;
  std::string voice_profile_id;
  std::string display_name;

  friend bool operator==(const IdentityRecord&, const IdentityRecord&) = default;
};

Json to_json(const IdentityRecord& identity);
IdentityRecord identity_from_json(const Json& j);

struct ContextSlot {
  std::string slot_name;
  std::string value;
  std::string source_embodiment;
  std::int64_t acquired_at = 0;

  friend bool operator==(const ContextSlot&, const ContextSlot&) = default;
};

Json to_json(const ContextSlot& slot);
ContextSlot slot_from_json(const Json& j);

// The slots an embodiment is allowed to see, keyed by slot name.
using ContextView = std::map<std::string, ContextSlot>;

// The slot names a deployment accepts. Defaults to the four study slots;
// additional names may be appended from configuration.
class SlotSchema {
 public:
  SlotSchema();
  explicit SlotSchema(std::vector<std::string> names);

  bool contains(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }
  void add(std::string name);

 private:
  std::vector<std::string> names_;
};

inline constexpr std::string_view kSlotName = "name";
inline constexpr std::string_view kSlotFeeling = "feeling";
inline constexpr std::string_view kSlotDrink = "drink";
inline constexpr std::string_view kSlotVisitReason = "visit_reason";

}  // namespace migrant

#endif  // MIGRANT_PROTOCOL_HPP
