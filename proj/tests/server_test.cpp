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

#include "migrant/server.hpp"

#include <gtest/gtest.h>

#include "migrant/dialogue.hpp"
#include "migrant/error.hpp"
#include "migrant/nlu.hpp"
#include "migrant/store.hpp"

namespace migrant {
namespace {

struct Served {
  Served()
      : orchestrator(std::make_shared<MemoryStore>(), std::make_shared<SystemClock>()),
        service(orchestrator, nlu::Grammar::bundled(), dialogue::ScriptLibrary::bundled()),
        server(service, "127.0.0.1", 0) {
    Deployment::bundled().install(orchestrator);
    server.start();
  }

  Orchestrator orchestrator;
  AgentService service;
  Server server;
};

// One embodiment speaking over a real socket.
struct Device {
  Device(Served& s, std::string session, std::string embodiment)
      : client("127.0.0.1", s.server.port()),
        seq(std::move(session), std::move(embodiment)) {}

  void send(MsgType type, Json payload = Json::object()) {
    client.send(seq.make(type, std::move(payload), 0));
  }
  Envelope expect(MsgType type) {
    Envelope env = client.receive();
    EXPECT_EQ(env.msg_type, type) << encode(env);
    return env;
  }

  WsClient client;
  Sequencer seq;
};

TEST(Server, RegisterWakeUtteranceAndGame) {
  Served s;
  Device home(s, "W1", "home");
  home.send(MsgType::kRegister, Json{{"policy", "(INF+,ID+)"}});
  const Envelope sync = home.expect(MsgType::kContextSync);
  EXPECT_TRUE(sync.payload["registered"].get<bool>());
  EXPECT_EQ(sync.seq, 1u);

  home.send(MsgType::kWake);
  EXPECT_TRUE(home.expect(MsgType::kContextSync).payload["activated"].get<bool>());
  const Envelope first = home.expect(MsgType::kAgentSay);
  EXPECT_EQ(first.payload["pending_slot"], "name");

  home.send(MsgType::kUtterance, Json{{"text", "My name is Alice"}});
  const Envelope second = home.expect(MsgType::kAgentSay);
  EXPECT_EQ(second.payload["turn_index"], 1);
  EXPECT_GT(second.seq, first.seq);
  EXPECT_EQ(s.orchestrator.snapshot("W1").slots.at("name").value, "Alice");

  home.send(MsgType::kGameMove, Json{{"give", 4}, {"predict", 4}});
  const Envelope result = home.expect(MsgType::kGameResult);
  EXPECT_EQ(result.payload["payoff_self"], 8);
}

TEST(Server, MigrationNeedsAckFromTarget) {
  Served s;
  Device home(s, "W2", "home");
  Device desk(s, "W2", "receptionist");
  home.send(MsgType::kRegister, Json{{"policy", "(INF+,ID-)"}});
  home.expect(MsgType::kContextSync);
  desk.send(MsgType::kRegister);
  desk.expect(MsgType::kContextSync);

  home.send(MsgType::kWake);
  home.expect(MsgType::kContextSync);
  home.expect(MsgType::kAgentSay);
  home.send(MsgType::kUtterance, Json{{"text", "Call me Dana"}});
  home.expect(MsgType::kAgentSay);

  desk.send(MsgType::kWake);
  const Envelope payload = desk.expect(MsgType::kMigratePayload);
  EXPECT_TRUE(payload.payload.contains("context"));
  EXPECT_FALSE(payload.payload.contains("identity"));
  desk.send(MsgType::kMigrateAck, Json{{"migration_id", payload.payload["migration_id"]}});
  const Envelope activated = desk.expect(MsgType::kContextSync);
  EXPECT_EQ(activated.payload["presentation"]["home_identity"], false);
  const Envelope greet = desk.expect(MsgType::kAgentSay);
  EXPECT_NE(greet.payload["text"].get<std::string>().find("Dana"), std::string::npos);
  EXPECT_EQ(s.orchestrator.snapshot("W2").current_embodiment, "receptionist");
}

TEST(Server, BadFramesGetErrors) {
  Served s;
  Device d(s, "W3", "home");
  d.client.send_raw("{broken\n");
  EXPECT_EQ(d.expect(MsgType::kError).payload["code"], "MalformedFrame");
  d.client.send_raw(R"({"msg_type":"FLY","session_id":"W3","embodiment_id":"home","seq":1,)"
                    R"("timestamp_ms":0,"payload":{}})"
                    "\n");
  EXPECT_EQ(d.expect(MsgType::kError).payload["code"], "UnknownType");
  d.send(MsgType::kRegister);
  EXPECT_EQ(d.expect(MsgType::kError).payload["code"], "UnknownSession");
}

TEST(Server, SeveralFramesInOneMessage) {
  Served s;
  Device d(s, "W4", "display");
  std::string batch = encode(d.seq.make(MsgType::kRegister, Json{{"policy", "(INF-,ID-)"}}, 0));
  batch += encode(d.seq.make(MsgType::kWake, Json::object(), 0));
  d.client.send_raw(batch);
  d.expect(MsgType::kContextSync);
  d.expect(MsgType::kContextSync);
  d.expect(MsgType::kAgentSay);
}

TEST(Server, StopsCleanlyWithOpenConnections) {
  auto s = std::make_unique<Served>();
  Device d(*s, "W5", "home");
  d.send(MsgType::kRegister, Json{{"policy", "(INF+,ID+)"}});
  d.expect(MsgType::kContextSync);
  s->server.stop();
  EXPECT_THROW(d.client.receive(), Error);
}

}  // namespace
}  // namespace migrant
