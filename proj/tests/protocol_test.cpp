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

#include <gtest/gtest.h>

#include "migrant/error.hpp"
#include "migrant/rng.hpp"

namespace migrant {
namespace {

std::string random_text(Rng& rng) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789.,!?'\"\\/\n\t{}[]:";
  std::string s;
  const auto len = rng.below(24);
  for (std::uint64_t i = 0; i < len; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
  if (rng.bernoulli(0.1)) s += "caf\xc3\xa9";
  return s;
}

Json payload_for(MsgType type, Rng& rng) {
  Json p = Json::object();
  switch (type) {
    case MsgType::kUtterance:
    case MsgType::kAgentSay:
      p["text"] = random_text(rng);
      break;
    case MsgType::kGameMove:
      p["give"] = static_cast<int>(rng.below(5));
      p["predict"] = static_cast<int>(rng.below(5));
      break;
    case MsgType::kError:
      p["code"] = "SchemaViolation";
      p["message"] = random_text(rng);
      break;
    default:
      break;
  }
  const auto extra = rng.below(4);
  for (std::uint64_t i = 0; i < extra; ++i) {
    const std::string key = "k" + std::to_string(rng.below(1000));
    switch (rng.below(4)) {
      case 0: p[key] = random_text(rng); break;
      case 1: p[key] = static_cast<std::int64_t>(rng.next() >> 12) - (1LL << 50); break;
      case 2: p[key] = rng.bernoulli(0.5); break;
      default: p[key] = Json::array({1, "two", nullptr}); break;
    }
  }
  return p;
}

Envelope random_envelope(MsgType type, Rng& rng) {
  Envelope env;
  env.msg_type = type;
  env.session_id = "s" + std::to_string(rng.below(1000000));
  env.embodiment_id = random_text(rng);
  env.seq = rng.next();
  env.timestamp_ms = static_cast<std::int64_t>(rng.next() >> 1) * (rng.bernoulli(0.5) ? 1 : -1);
  env.payload = payload_for(type, rng);
  return env;
}

ErrorCode code_of(std::string_view frame) {
  try {
    decode(frame);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decoded: " << frame;
  return ErrorCode::kIoError;
}

TEST(Protocol, RoundTripsGeneratedEnvelopesOfEveryKind) {
  Rng rng(20260415);
  for (MsgType type : kAllMsgTypes) {
    for (int i = 0; i < 1000; ++i) {
      const Envelope env = random_envelope(type, rng);
      const std::string frame = encode(env);
      ASSERT_EQ(frame.back(), '\n');
      ASSERT_EQ(frame.find('\n'), frame.size() - 1);
      ASSERT_EQ(decode(frame), env) << frame;
      ASSERT_EQ(encode(decode(frame)), frame);
    }
  }
}

TEST(Protocol, EncodingIsCanonical) {
  Envelope env;
  env.msg_type = MsgType::kUtterance;
  env.session_id = "s1";
  env.embodiment_id = "home";
  env.seq = 3;
  env.timestamp_ms = 1000;
  env.payload = Json{{"text", "hi"}};
  EXPECT_EQ(encode(env),
            "{\"msg_type\":\"UTTERANCE\",\"session_id\":\"s1\",\"embodiment_id\":\"home\","
            "\"seq\":3,\"timestamp_ms\":1000,\"payload\":{\"text\":\"hi\"}}\n");
}

TEST(Protocol, KeyOrderOnInputDoesNotMatter) {
  const auto env = decode(
      R"({"payload":{"text":"x"},"seq":1,"timestamp_ms":2,"embodiment_id":"e",)"
      R"("session_id":"s","msg_type":"AGENT_SAY"})");
  EXPECT_EQ(env.msg_type, MsgType::kAgentSay);
  EXPECT_EQ(env.seq, 1u);
}

TEST(Protocol, ConcatenatedFramesSplitBack) {
  Rng rng(5);
  for (int k : {0, 1, 2, 7, 50}) {
    std::vector<Envelope> sent;
    std::string stream;
    for (int i = 0; i < k; ++i) {
      sent.push_back(random_envelope(kAllMsgTypes[rng.below(std::size(kAllMsgTypes))], rng));
      stream += encode(sent.back());
    }
    EXPECT_EQ(decode_stream(stream), sent);
  }
}

TEST(Protocol, FrameReaderHandlesArbitraryChunking) {
  Rng rng(9);
  std::vector<Envelope> sent;
  std::string stream;
  for (int i = 0; i < 20; ++i) {
    sent.push_back(random_envelope(MsgType::kUtterance, rng));
    stream += encode(sent.back());
  }
  FrameReader reader;
  std::vector<Envelope> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    const auto n = std::min<std::size_t>(1 + rng.below(17), stream.size() - pos);
    reader.feed(std::string_view(stream).substr(pos, n));
    pos += n;
    while (auto env = reader.next()) got.push_back(*env);
  }
  EXPECT_EQ(got, sent);
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(Protocol, TrailingPartialFrameIsMalformed) {
  Envelope env;
  env.msg_type = MsgType::kWake;
  std::string stream = encode(env) + encode(env);
  stream.pop_back();
  stream.pop_back();
  try {
    decode_stream(stream);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedFrame);
  }
}

TEST(Protocol, Errors) {
  EXPECT_EQ(code_of("{not json"), ErrorCode::kMalformedFrame);
  EXPECT_EQ(code_of("[1,2]"), ErrorCode::kMalformedFrame);
  EXPECT_EQ(code_of(""), ErrorCode::kMalformedFrame);
  EXPECT_EQ(code_of(R"({"msg_type":"TELEPORT","session_id":"s","embodiment_id":"e","seq":1,)"
                    R"("timestamp_ms":0,"payload":{}})"),
            ErrorCode::kUnknownType);
  EXPECT_EQ(code_of(R"({"msg_type":"WAKE","embodiment_id":"e","seq":1,"timestamp_ms":0,)"
                    R"("payload":{}})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"msg_type":"WAKE","session_id":"s","embodiment_id":"e","seq":-1,)"
                    R"("timestamp_ms":0,"payload":{}})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"msg_type":"WAKE","session_id":"s","embodiment_id":"e","seq":1,)"
                    R"("timestamp_ms":0,"payload":[]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"msg_type":"UTTERANCE","session_id":"s","embodiment_id":"e","seq":1,)"
                    R"("timestamp_ms":0,"payload":{}})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"msg_type":"GAME_MOVE","session_id":"s","embodiment_id":"e","seq":1,)"
                    R"("timestamp_ms":0,"payload":{"give":1}})"),
            ErrorCode::kSchemaViolation);
}

TEST(Protocol, OrderingCheckReportsFirstOffender) {
  std::vector<Envelope> frames(5);
  const std::uint64_t seqs[] = {1, 2, 5, 5, 3};
  for (int i = 0; i < 5; ++i) frames[i].seq = seqs[i];
  EXPECT_EQ(check_ordering(frames), 3u);
  frames[3].seq = 6;
  frames[4].seq = 7;
  EXPECT_EQ(check_ordering(frames), std::nullopt);
  EXPECT_EQ(check_ordering(std::span<const Envelope>{}), std::nullopt);
}

TEST(Protocol, SequencerStampsIncreasingSeq) {
  Sequencer seq("s", "home");
  std::vector<Envelope> frames;
  for (int i = 0; i < 10; ++i) frames.push_back(seq.make(MsgType::kWake, Json::object(), i));
  EXPECT_EQ(frames.front().seq, 1u);
  EXPECT_EQ(check_ordering(frames), std::nullopt);
}

TEST(Protocol, MessageTypeNames) {
  for (MsgType t : kAllMsgTypes) EXPECT_EQ(parse_msg_type(to_string(t)), t);
  EXPECT_EQ(to_string(MsgType::kMigrateAck), "MIGRATE_ACK");
  EXPECT_EQ(parse_msg_type("wake"), std::nullopt);
}

TEST(Protocol, RecordsRoundTrip) {
  const IdentityRecord id{"panda", "avatar_panda", "voice_panda", "Panda"};
  EXPECT_EQ(identity_from_json(to_json(id)), id);
  const ContextSlot slot{"name", "Alice", "home", 42};
  EXPECT_EQ(slot_from_json(to_json(slot)), slot);
}

}  // namespace
}  // namespace migrant
