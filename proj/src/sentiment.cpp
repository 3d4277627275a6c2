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

#include "migrant/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <numeric>

#include "httplib.h"
#include "migrant/error.hpp"
#include "migrant/protocol.hpp"

namespace migrant::stats {
namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

bool is_negator(std::string_view w) {
  return w == "not" || w == "no" || w == "never" || w == "didn't" || w == "don't" ||
         w == "wasn't" || w == "isn't" || w == "hardly";
}

}  // namespace

LexiconSentiment::LexiconSentiment()
    : positive_{"good",     "great",    "helpful",   "friendly",  "nice",
                "liked",    "like",     "enjoyed",   "trust",     "trusted",
                "smart",    "caring",   "comfortable", "pleasant", "warm",
                "remembered", "personal", "engaging", "natural", "reliable",
                "competent", "happy",   "love",      "excellent", "seamless"},
      negative_{"bad",      "creepy",   "annoying",  "confusing", "cold",
                "awkward",  "robotic",  "forgot",    "repetitive", "uncomfortable",
                "distrust", "unhelpful", "boring",   "strange",   "invasive",
                "weird",    "dislike",  "frustrating", "slow",    "fake"} {
  std::sort(positive_.begin(), positive_.end());
  std::sort(negative_.begin(), negative_.end());
}

double LexiconSentiment::score_one(std::string_view text) const {
  const auto words = words_of(text);
  int pos = 0, neg = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const bool negated = i > 0 && is_negator(words[i - 1]);
    int polarity = 0;
    if (std::binary_search(positive_.begin(), positive_.end(), words[i])) polarity = 1;
    if (std::binary_search(negative_.begin(), negative_.end(), words[i])) polarity = -1;
    if (negated) polarity = -polarity;
    if (polarity > 0) ++pos;
    if (polarity < 0) ++neg;
  }
  if (pos + neg == 0) return 0.5;
  return 0.5 + 0.5 * static_cast<double>(pos - neg) / (pos + neg);
}

std::vector<double> LexiconSentiment::score(std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score_one(t));
  return out;
}

RemoteSentiment::RemoteSentiment(std::string host, int port, std::string path,
                                 std::chrono::milliseconds timeout)
    : host_(std::move(host)), port_(port), path_(std::move(path)), timeout_(timeout) {}

std::vector<double> RemoteSentiment::score(std::span<const std::string> texts) {
  Json body = Json::object();
  body["documents"] = Json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Json doc = Json::object();
    doc["id"] = std::to_string(i);
    doc["text"] = texts[i];
    body["documents"].push_back(std::move(doc));
  }

  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderFailure,
                "sentiment service unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderFailure,
                "sentiment service returned HTTP " + std::to_string(res->status));
  }

  Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("documents") ||
      !reply["documents"].is_array()) {
    throw Error(ErrorCode::kProviderFailure, "malformed sentiment response");
  }
  std::vector<double> scores(texts.size(), -1.0);
  for (const auto& doc : reply["documents"]) {
    if (!doc.contains("id") || !doc["id"].is_string() || !doc.contains("score") ||
        !doc["score"].is_number()) {
      throw Error(ErrorCode::kProviderFailure, "malformed sentiment document");
    }
    const std::string& key = doc["id"].get_ref<const std::string&>();
    std::size_t id = 0;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
    if (ec != std::errc() || end != key.data() + key.size()) {
      throw Error(ErrorCode::kProviderFailure, "unknown sentiment document id " + key);
    }
    const double s = doc["score"].get<double>();
    if (id >= scores.size() || s < 0.0 || s > 1.0) {
      throw Error(ErrorCode::kProviderFailure, "sentiment document out of range");
    }
    scores[id] = s;
  }
  if (std::any_of(scores.begin(), scores.end(), [](double s) { return s < 0.0; })) {
    throw Error(ErrorCode::kProviderFailure, "sentiment response missing documents");
  }
  return scores;
}

double sentiment(std::span<const std::string> texts, SentimentProvider& provider) {
  if (texts.empty()) throw Error(ErrorCode::kEmptyItems, "no texts to score");
  const auto scores = provider.score(texts);
  if (scores.size() != texts.size()) {
    throw Error(ErrorCode::kProviderFailure, "provider returned wrong score count");
  }
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

}  // namespace migrant::stats
