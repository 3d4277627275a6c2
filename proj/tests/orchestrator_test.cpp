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

#include "migrant/orchestrator.hpp"

#include <gtest/gtest.h>

#include "migrant/error.hpp"
#include "migrant/rng.hpp"
#include "migrant/store.hpp"

namespace migrant {
namespace {

// Records what the orchestrator sends and, optionally, acks migrations.
class FakeLink : public Link {
 public:
  FakeLink(Orchestrator* orchestrator, std::string embodiment_id, bool auto_ack)
      : orchestrator_(orchestrator), embodiment_id_(std::move(embodiment_id)),
        auto_ack_(auto_ack) {}

  bool alive() const override { return alive_; }
  void send(const Envelope& env) override {
    sent.push_back(env);
    if (auto_ack_ && env.msg_type == MsgType::kMigratePayload) {
      orchestrator_->acknowledge(env.session_id, embodiment_id_,
                                 env.payload["migration_id"].get<std::string>());
    }
  }

  std::vector<Envelope> sent;
  bool alive_ = true;

 private:
  Orchestrator* orchestrator_;
  std::string embodiment_id_;
  bool auto_ack_;
};

struct Fixture {
  explicit Fixture(OrchestratorConfig config = {})
      : store(std::make_shared<MemoryStore>()),
        clock(std::make_shared<ManualClock>(1000)),
        orchestrator(store, clock, config),
        deployment(Deployment::bundled()) {
    deployment.install(orchestrator);
  }

  std::string open(const MigrationPolicy& policy, bool auto_ack = true) {
    const std::string id = orchestrator.create_session(policy, deployment.home_identity);
    for (const auto& emb : deployment.journey) {
      auto link = std::make_shared<FakeLink>(&orchestrator, emb, auto_ack);
      links[emb] = link;
      orchestrator.connect(id, emb, link);
    }
    return id;
  }

  std::shared_ptr<MemoryStore> store;
  std::shared_ptr<ManualClock> clock;
  Orchestrator orchestrator;
  Deployment deployment;
  std::map<std::string, std::shared_ptr<FakeLink>> links;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(Policy, Labels) {
  for (const auto& p : kAllPolicies) EXPECT_EQ(MigrationPolicy::from_label(p.label()), p);
  EXPECT_EQ(MigrationPolicy({true, false}).label(), "(INF+,ID-)");
  EXPECT_EQ(policy_from_json(to_json(kAllPolicies[2])), kAllPolicies[2]);
  EXPECT_EQ(policy_from_json(Json("(INF-,ID+)")), kAllPolicies[2]);
}

// Random traces of wakes and slot fills; after every step the identity and
// context each embodiment would see must follow the policy.
TEST(Policy, SoundOverRandomTraces) {
  const std::vector<std::string> slots = {"name", "feeling", "drink", "visit_reason"};
  Rng rng(77);
  for (const auto& policy : kAllPolicies) {
    for (int trace = 0; trace < 25; ++trace) {
      Fixture f;
      const std::string id = f.open(policy);
      const auto& home = f.orchestrator.identity(f.deployment.home_identity);
      for (int step = 0; step < 30; ++step) {
        const auto& emb = f.deployment.journey[rng.below(f.deployment.journey.size())];
        if (rng.bernoulli(0.4)) {
          f.orchestrator.handle_wake(id, emb);
        } else {
          f.orchestrator.set_slot(id, slots[rng.below(slots.size())],
                                  "v" + std::to_string(step), emb);
        }
        f.clock->advance(100);
        const SessionState state = f.orchestrator.snapshot(id);
        for (const auto& e : f.deployment.journey) {
          const auto& desc = f.orchestrator.embodiment(e);
          const IdentityPresentation shown = f.orchestrator.identity_for(id, e);
          const bool expect_home = policy.migrate_identity || desc.is_home();
          EXPECT_EQ(shown.home_identity, expect_home);
          EXPECT_EQ(shown.identity, expect_home ? home : desc.native_identity);

          const ContextView view = f.orchestrator.context_for(id, e);
          if (policy.migrate_information) {
            EXPECT_EQ(view, ContextView(state.slots.begin(), state.slots.end()));
          } else {
            for (const auto& [name, slot] : view) EXPECT_EQ(slot.source_embodiment, e);
            for (const auto& [name, slot] : state.slots) {
              EXPECT_EQ(view.contains(name), slot.source_embodiment == e);
            }
          }
        }
      }
      EXPECT_EQ(snapshot_document(f.orchestrator.replay(id)),
                snapshot_document(f.orchestrator.snapshot(id)));
    }
  }
}

TEST(Orchestrator, IdentityVoiceMustDifferFromHome) {
  Fixture f;
  for (const auto& e : f.deployment.embodiments) {
    if (!e.is_home()) {
      EXPECT_NE(e.native_identity.voice_profile_id,
                f.orchestrator.identity(f.deployment.home_identity).voice_profile_id);
    }
  }
}

TEST(Orchestrator, MigrationPayloadFollowsPolicy) {
  for (const auto& policy : kAllPolicies) {
    Fixture f;
    const std::string id = f.open(policy);
    f.orchestrator.handle_wake(id, "home");
    f.orchestrator.set_slot(id, "name", "Alice", "home");
    const auto decision = f.orchestrator.handle_wake(id, "receptionist");
    ASSERT_TRUE(decision.migration.has_value());
    const auto& sent = f.links["receptionist"]->sent;
    ASSERT_EQ(sent.size(), 1u);
    const Json& p = sent[0].payload;
    EXPECT_EQ(sent[0].msg_type, MsgType::kMigratePayload);
    EXPECT_EQ(p.contains("identity"), policy.migrate_identity);
    EXPECT_EQ(p.contains("context"), policy.migrate_information);
    EXPECT_EQ(decision.context.contains("name"), policy.migrate_information);
    EXPECT_EQ(f.orchestrator.snapshot(id).current_embodiment, "receptionist");
  }
}

TEST(Orchestrator, RepeatedWakeIsIgnored) {
  Fixture f;
  const std::string id = f.open({true, true});
  f.orchestrator.handle_wake(id, "home");
  f.orchestrator.handle_wake(id, "receptionist");
  const auto events = f.orchestrator.snapshot(id).history.size();
  const auto again = f.orchestrator.handle_wake(id, "receptionist");
  EXPECT_TRUE(again.duplicate);
  EXPECT_FALSE(again.migration.has_value());
  EXPECT_EQ(f.orchestrator.snapshot(id).history.size(), events);
  EXPECT_EQ(f.links["receptionist"]->sent.size(), 1u);
}

TEST(Orchestrator, AckTimeoutRetriesOnce) {
  OrchestratorConfig config;
  config.ack_timeout = std::chrono::milliseconds(20);
  Fixture f(config);
  const std::string id = f.open({true, false}, /*auto_ack=*/false);
  f.orchestrator.handle_wake(id, "home");
  EXPECT_EQ(code_of([&] { f.orchestrator.handle_wake(id, "receptionist"); }),
            ErrorCode::kAckTimeout);
  EXPECT_EQ(f.links["receptionist"]->sent.size(), 2u);
  EXPECT_EQ(f.orchestrator.snapshot(id).current_embodiment, "home");
}

TEST(Orchestrator, Errors) {
  Fixture f;
  const std::string id = f.open({false, false});
  EXPECT_EQ(code_of([&] { f.orchestrator.create_session({}, "nobody"); }),
            ErrorCode::kUnknownIdentity);
  EXPECT_EQ(code_of([&] { f.orchestrator.handle_wake("nope", "home"); }),
            ErrorCode::kUnknownSession);
  EXPECT_EQ(code_of([&] { f.orchestrator.handle_wake(id, "garage"); }),
            ErrorCode::kUnknownEmbodiment);
  EXPECT_EQ(code_of([&] { f.orchestrator.set_slot(id, "shoe_size", "9", "home"); }),
            ErrorCode::kUnknownSlot);
  f.orchestrator.handle_wake(id, "home");
  EXPECT_EQ(code_of([&] { f.orchestrator.migrate(id, "display", "receptionist"); }),
            ErrorCode::kNotCurrent);
  f.links["receptionist"]->alive_ = false;
  EXPECT_EQ(code_of([&] { f.orchestrator.migrate(id, "home", "receptionist"); }),
            ErrorCode::kTargetUnavailable);
  f.orchestrator.disconnect(id, "display");
  EXPECT_EQ(code_of([&] { f.orchestrator.migrate(id, "home", "display"); }),
            ErrorCode::kTargetUnavailable);
  EXPECT_EQ(code_of([&] { f.orchestrator.record(id, EventKind::kSlotSet, Json::object()); }),
            ErrorCode::kSchemaViolation);
}

TEST(Orchestrator, SessionIdsAreSequential) {
  Fixture f;
  EXPECT_EQ(f.orchestrator.create_session({}, "panda"), "s000001");
  EXPECT_EQ(f.orchestrator.create_session({}, "panda"), "s000002");
  SessionOptions named;
  named.session_id = "P07";
  EXPECT_EQ(f.orchestrator.create_session({}, "panda", named), "P07");
  EXPECT_TRUE(f.orchestrator.has_session("P07"));
}

TEST(Replay, MatchesLiveState) {
  Fixture f;
  const std::string id = f.open({true, false});
  f.orchestrator.handle_wake(id, "home");
  f.orchestrator.set_slot(id, "name", "Bo", "home");
  f.orchestrator.record(id, EventKind::kUtterance, Json{{"text", "hi"}});
  f.orchestrator.handle_wake(id, "receptionist");
  f.orchestrator.set_slot(id, "visit_reason", "job interview", "receptionist");
  const std::string live = snapshot_document(f.orchestrator.snapshot(id));
  EXPECT_EQ(snapshot_document(replay_session(*f.store, id)), live);
  f.orchestrator.persist_snapshot(id);
  EXPECT_EQ(f.store->get("sessions", id + ".snapshot.json"), live);
}

TEST(Replay, GapInEventIdsIsCorrupt) {
  Fixture f;
  const std::string id = f.open({true, true});
  f.orchestrator.handle_wake(id, "home");
  f.orchestrator.set_slot(id, "name", "Bo", "home");
  f.orchestrator.set_slot(id, "feeling", "calm", "home");

  MemoryStore damaged;
  damaged.put("sessions", id + ".meta.json", *f.store->get("sessions", id + ".meta.json"));
  const auto lines = f.store->read_lines("sessions", id + ".events.jsonl");
  ASSERT_EQ(lines.size(), 3u);
  damaged.append_line("sessions", id + ".events.jsonl", lines[0]);
  damaged.append_line("sessions", id + ".events.jsonl", lines[2]);
  EXPECT_EQ(code_of([&] { replay_session(damaged, id); }), ErrorCode::kCorruptLog);
  EXPECT_EQ(code_of([&] { replay_session(damaged, "missing"); }), ErrorCode::kUnknownSession);
}

TEST(Replay, EventsRoundTrip) {
  EventRecord e{7, "s1", EventKind::kSlotSet, Json{{"slot", to_json(ContextSlot{"name", "A", "home", 5})}}, 5};
  const EventRecord back = decode_event(encode_event(e));
  EXPECT_EQ(back.event_id, 7);
  EXPECT_EQ(back.kind, EventKind::kSlotSet);
  EXPECT_EQ(back.body, e.body);
}

TEST(Deployment, BundledIsConsistent) {
  const Deployment d = Deployment::bundled();
  EXPECT_EQ(d.journey, (std::vector<std::string>{"home", "receptionist", "display"}));
  EXPECT_EQ(d.home_identity, "panda");
  Orchestrator o(std::make_shared<MemoryStore>(), std::make_shared<ManualClock>());
  d.install(o);
  EXPECT_TRUE(o.embodiment("home").is_home());
  EXPECT_EQ(o.embodiment("receptionist").kind, EmbodimentKind::kReceptionistRobot);
}

TEST(Store, FileStoreRoundTrip) {
  const auto root = std::filesystem::temp_directory_path() / "migrant_store_test";
  std::filesystem::remove_all(root);
  FileStore store(root);
  store.put("c", "b.json", "two");
  store.put("c", "a.json", "one");
  store.append_line("c", "log", "x");
  store.append_line("c", "log", "y");
  EXPECT_EQ(store.get("c", "a.json"), "one");
  EXPECT_EQ(store.get("c", "zzz"), std::nullopt);
  EXPECT_EQ(store.read_lines("c", "log"), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(store.keys("c"), (std::vector<std::string>{"a.json", "b.json", "log"}));
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace migrant
