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

#include "migrant/protocol.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "migrant/error.hpp"

namespace migrant {
namespace {

constexpr std::array<std::pair<MsgType, std::string_view>, 11> kTypeNames{{
    {MsgType::kRegister, "REGISTER"},
    {MsgType::kWake, "WAKE"},
    {MsgType::kUtterance, "UTTERANCE"},
    {MsgType::kAgentSay, "AGENT_SAY"},
    {MsgType::kMigrateRequest, "MIGRATE_REQUEST"},
    {MsgType::kMigratePayload, "MIGRATE_PAYLOAD"},
    {MsgType::kMigrateAck, "MIGRATE_ACK"},
    {MsgType::kContextSync, "CONTEXT_SYNC"},
    {MsgType::kGameMove, "GAME_MOVE"},
    {MsgType::kGameResult, "GAME_RESULT"},
    {MsgType::kError, "ERROR"},
}};

// Payload keys a kind cannot do without.
std::vector<std::string_view> required_payload_keys(MsgType type) {
  switch (type) {
    case MsgType::kUtterance:
    case MsgType::kAgentSay:
      return {"text"};
    case MsgType::kGameMove:
      return {"give", "predict"};
    case MsgType::kError:
      return {"code", "message"};
    default:
      return {};
  }
}

const Json& require(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::kSchemaViolation, std::string("missing field ") + key);
  }
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kSchemaViolation, std::string(key) + " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

std::string_view to_string(MsgType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "ERROR";
}

std::optional<MsgType> parse_msg_type(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string encode(const Envelope& env) {
  Json j = Json::object();
  j["msg_type"] = to_string(env.msg_type);
  j["session_id"] = env.session_id;
  j["embodiment_id"] = env.embodiment_id;
  j["seq"] = env.seq;
  j["timestamp_ms"] = env.timestamp_ms;
  j["payload"] = env.payload.is_null() ? Json::object() : env.payload;
  std::string out = j.dump();
  out.push_back('\n');
  return out;
}

Envelope decode(std::string_view frame) {
  if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
  if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
  Json j = Json::parse(frame.begin(), frame.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kMalformedFrame, "frame is not a JSON object");
  }

  Envelope env;
  const std::string type_name = require_string(j, "msg_type");
  auto type = parse_msg_type(type_name);
  if (!type) throw Error(ErrorCode::kUnknownType, type_name);
  env.msg_type = *type;
  env.session_id = require_string(j, "session_id");
  env.embodiment_id = require_string(j, "embodiment_id");

  const Json& seq = require(j, "seq");
  if (!seq.is_number_unsigned()) {
    throw Error(ErrorCode::kSchemaViolation, "seq must be a non-negative integer");
  }
  env.seq = seq.get<std::uint64_t>();
  const Json& ts = require(j, "timestamp_ms");
  if (!ts.is_number_integer()) {
    throw Error(ErrorCode::kSchemaViolation, "timestamp_ms must be an integer");
  }
  env.timestamp_ms = ts.get<std::int64_t>();

  const Json& payload = require(j, "payload");
  if (!payload.is_object()) {
    throw Error(ErrorCode::kSchemaViolation, "payload must be an object");
  }
  for (std::string_view key : required_payload_keys(env.msg_type)) {
    if (!payload.contains(key)) {
      throw Error(ErrorCode::kSchemaViolation,
                  type_name + " payload missing " + std::string(key));
    }
  }
  env.payload = payload;
  return env;
}

std::optional<std::size_t> check_ordering(std::span<const Envelope> frames) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].seq <= frames[i - 1].seq) return i;
  }
  return std::nullopt;
}

void FrameReader::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<Envelope> FrameReader::next() {
  auto pos = buffer_.find('\n');
  if (pos == std::string::npos) return std::nullopt;
  std::string line = buffer_.substr(0, pos + 1);
  buffer_.erase(0, pos + 1);
  return decode(line);
}

std::vector<Envelope> decode_stream(std::string_view bytes) {
  FrameReader reader;
  reader.feed(bytes);
  std::vector<Envelope> out;
  while (auto env = reader.next()) out.push_back(std::move(*env));
  if (reader.buffered() != 0) {
    throw Error(ErrorCode::kMalformedFrame, "trailing partial frame");
  }
  return out;
}

Envelope Sequencer::make(MsgType type, Json payload, std::int64_t timestamp_ms) {
  Envelope env;
  env.msg_type = type;
  env.session_id = session_id_;
  env.embodiment_id = embodiment_id_;
  env.seq = next_seq_++;
  env.timestamp_ms = timestamp_ms;
  env.payload = payload.is_null() ? Json::object() : std::move(payload);
  return env;
}

Json to_json(const IdentityRecord& identity) {
  Json j = Json::object();
  j["identity_id"] = identity.identity_id;
  j["visual_asset_id"] = identity.visual_asset_id;
  j["voice_profile_id"] = identity.voice_profile_id;
  j["display_name"] = identity.display_name;
  return j;
}

IdentityRecord identity_from_json(const Json& j) {
  IdentityRecord r;
  r.identity_id = require_string(j, "identity_id");
  r.visual_asset_id = require_string(j, "visual_asset_id");
  r.voice_profile_id = require_string(j, "voice_profile_id");
  r.display_name = require_string(j, "display_name");
  return r;
}

Json to_json(const ContextSlot& slot) {
  Json j = Json::object();
  j["slot_name"] = slot.slot_name;
  j["value"] = slot.value;
  j["source_embodiment"] = slot.source_embodiment;
  j["acquired_at"] = slot.acquired_at;
  return j;
}

ContextSlot slot_from_json(const Json& j) {
  ContextSlot s;
  s.slot_name = require_string(j, "slot_name");
  s.value = require_string(j, "value");
  s.source_embodiment = require_string(j, "source_embodiment");
  const Json& at = require(j, "acquired_at");
  if (!at.is_number_integer()) {
    throw Error(ErrorCode::kSchemaViolation, "acquired_at must be an integer");
  }
  s.acquired_at = at.get<std::int64_t>();
  return s;
}

SlotSchema::SlotSchema()
    : names_{std::string(kSlotName), std::string(kSlotFeeling),
             std::string(kSlotDrink), std::string(kSlotVisitReason)} {}

SlotSchema::SlotSchema(std::vector<std::string> names) : names_(std::move(names)) {}

bool SlotSchema::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void SlotSchema::add(std::string name) {
  if (!contains(name)) names_.push_back(std::move(name));
}

}  // namespace migrant
