#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "scsim/agent/llm_policy.hpp"
#include "scsim/core/dataset.hpp"
#include "scsim/error.hpp"

namespace fixture {

using scsim::CompanyId;
using scsim::Dataset;

/// Edges per timestamp as (supplier, customer) company indices.
using EdgeLists = std::vector<std::vector<std::pair<int, int>>>;

/// Dataset with companies "Company-0001".., industries cycling through
/// `industries`, features from `feature(company, t, f)` and the given edges.
inline Dataset build(int n, int T, const EdgeLists& edges, const std::vector<std::string>& industries,
                     const std::function<double(int, int, int)>& feature,
                     std::vector<std::string> featureNames = {"Operation", "Technology", "Reputation"}) {
  Dataset ds;
  ds.featureNames = std::move(featureNames);
  const int F = static_cast<int>(ds.featureNames.size());
  for (int t = 0; t < T; ++t) ds.timestampLabels.push_back("Q" + std::to_string(t + 1));
  ds.globalKnowledge = "Toy market.";
  for (int i = 0; i < n; ++i) {
    scsim::CompanyRecord c;
    char buf[32];
    std::snprintf(buf, sizeof buf, "Company-%04d", i + 1);
    c.id = CompanyId(buf);
    c.industry = industries[static_cast<std::size_t>(i) % industries.size()];
    c.knowledge = "Firm " + std::to_string(i + 1) + ".";
    c.features.resize(T, F);
    for (int t = 0; t < T; ++t)
      for (int f = 0; f < F; ++f) c.features(t, f) = feature(i, t, f);
    ds.companies.push_back(std::move(c));
  }
  for (int t = 0; t < T; ++t) {
    scsim::EdgeSet s;
    if (t < static_cast<int>(edges.size()))
      for (auto [u, v] : edges[static_cast<std::size_t>(t)])
        s.insert({ds.companies[static_cast<std::size_t>(u)].id, ds.companies[static_cast<std::size_t>(v)].id});
    ds.network.push_back(scsim::make_snapshot(std::move(s)));
  }
  scsim::validate(ds);
  return ds;
}

inline CompanyId id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Company-%04d", index + 1);
  return CompanyId(buf);
}

/// Random dataset: features uniform on [0, 100] rounded to 2 decimals, each
/// ordered pair an edge with probability `density`.
inline Dataset random(int n, int T, double density, std::uint64_t seed,
                      const std::vector<std::string>& industries = {"A", "B", "C"}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EdgeLists edges(static_cast<std::size_t>(T));
  for (auto& list : edges)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && u(rng) < density) list.emplace_back(a, b);
  std::vector<double> values;
  for (int i = 0; i < n * T * 3; ++i) values.push_back(std::round(u(rng) * 10000.0) / 100.0);
  return build(n, T, edges, industries,
               [&](int c, int t, int f) { return values[static_cast<std::size_t>((c * T + t) * 3 + f)]; });
}

/// Prompt templates that prefix every system prompt with
/// "[stage:<name> self:<id>]" so scripted transports can route answers.
inline scsim::PromptTemplates tagged_templates() {
  scsim::PromptTemplates t;
  auto tag = [](const char* stage, const scsim::AgentView& v, scsim::StagePrompt p) {
    p.system = std::string("[stage:") + stage + " self:" + v.self.str() + "]\n" + p.system;
    return p;
  };
  t.plan = [tag](const scsim::AgentView& v) { return tag("plan", v, scsim::render_plan_prompt(v)); };
  t.query = [tag](const scsim::AgentView& v, const std::vector<scsim::PlanRecord>& p) {
    return tag("query", v, scsim::render_query_prompt(v, p));
  };
  t.request = [tag](const scsim::AgentView& v, const std::vector<scsim::PlanRecord>& p,
                    const std::vector<scsim::QueryConstraint>& q,
                    const std::vector<std::vector<scsim::CandidateDetail>>& c) {
    return tag("request", v, scsim::render_request_prompt(v, p, q, c));
  };
  t.reply = [tag](const scsim::AgentView& v, const scsim::Inbox& in) {
    return tag("reply", v, scsim::render_reply_prompt(v, in));
  };
  return t;
}

struct Tag {
  std::string stage;
  std::string self;
};

inline Tag tag_of(const std::vector<scsim::ChatMessage>& messages) {
  const auto& s = messages.at(0).content;
  const auto a = s.find("[stage:"), b = s.find(" self:"), e = s.find(']');
  if (a != 0 || b == std::string::npos || e == std::string::npos)
    throw scsim::Error(scsim::Errc::TransportError, "untagged prompt");
  return {s.substr(7, b - 7), s.substr(b + 6, e - b - 6)};
}

/// Requesters listed in a reply prompt's "Request from company [...]" lines.
inline std::vector<std::string> requesters_in(const std::string& user) {
  std::vector<std::string> out;
  const std::string key = "Request from company [";
  for (std::size_t pos = user.find(key); pos != std::string::npos; pos = user.find(key, pos + 1)) {
    const auto end = user.find(']', pos);
    const std::string list = user.substr(pos + key.size(), end - pos - key.size());
    for (std::size_t q = list.find('\''); q != std::string::npos; q = list.find('\'', q + 1)) {
      const auto close = list.find('\'', q + 1);
      out.push_back(list.substr(q + 1, close - q - 1));
      q = close;
    }
  }
  return out;
}

}  // namespace fixture
