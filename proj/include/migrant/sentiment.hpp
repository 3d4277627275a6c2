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

#ifndef MIGRANT_SENTIMENT_HPP
#define MIGRANT_SENTIMENT_HPP

#include <chrono>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace migrant::stats {

// Scores free text from 0 (negative) to 1 (positive).
class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  virtual std::vector<double> score(std::span<const std::string> texts) = 0;
};

// Deterministic word-list scorer: 0.5 + 0.5 * (pos - neg) / (pos + neg),
// with a one-word negation window. Texts without polar words score 0.5.
class LexiconSentiment : public SentimentProvider {
 public:
  LexiconSentiment();
  std::vector<double> score(std::span<const std::string> texts) override;
  double score_one(std::string_view text) const;

 private:
  std::vector<std::string> positive_;
  std::vector<std::string> negative_;
};

// Client for a generic scoring service.
//
//   POST {path}  {"documents":[{"id":"0","text":"..."}, ...]}
//   200          {"documents":[{"id":"0","score":0.73}, ...]}
//
// Any transport error, non-200 status, or malformed body raises
// kProviderFailure.
class RemoteSentiment : public SentimentProvider {
 public:
  RemoteSentiment(std::string host, int port, std::string path = "/sentiment",
                  std::chrono::milliseconds timeout = std::chrono::seconds(5));
  std::vector<double> score(std::span<const std::string> texts) override;

 private:
  std::string host_;
  int port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Mean of the per-text scores. Throws kEmptyItems on an empty list.
double sentiment(std::span<const std::string> texts, SentimentProvider& provider);

}  // namespace migrant::stats

#endif  // MIGRANT_SENTIMENT_HPP
