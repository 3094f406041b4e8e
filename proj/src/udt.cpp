#include "twincast/udt.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace twincast {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

UserTwin UserTwin::make(int user_id, int C) {
  UserTwin t;
  t.user_id = user_id;
  t.swipe_dist.assign(static_cast<std::size_t>(C), {});
  return t;
}

void ingest_window(UserTwin& twin, std::span<const double> channel_samples,
                   std::span<const std::array<double, 2>> locations,
                   std::span<const SwipeEvent> swipe_events,
                   std::span<const std::vector<double>> pref_samples, int F1,
                   int F2) {
  if (channel_samples.size() != static_cast<std::size_t>(F1))
    fail("ingest_window: expected F1=" + std::to_string(F1) +
         " channel samples, got " + std::to_string(channel_samples.size()));
  if (locations.size() != static_cast<std::size_t>(F1))
    fail("ingest_window: expected F1=" + std::to_string(F1) +
         " locations, got " + std::to_string(locations.size()));
  if (swipe_events.size() > static_cast<std::size_t>(F2))
    fail("ingest_window: at most F2=" + std::to_string(F2) +
         " swipe events, got " + std::to_string(swipe_events.size()));
  if (pref_samples.size() != static_cast<std::size_t>(F2))
    fail("ingest_window: expected F2=" + std::to_string(F2) +
         " preference samples, got " + std::to_string(pref_samples.size()));
  twin.channel.assign(channel_samples.begin(), channel_samples.end());
  twin.location.assign(locations.begin(), locations.end());
  twin.swipes.assign(swipe_events.begin(), swipe_events.end());
  twin.prefs.assign(pref_samples.begin(), pref_samples.end());
}

SwipeCounts swipe_counts(const UserTwin& twin, std::span<const int> delivered) {
  const std::size_t C = twin.swipe_dist.size();
  if (delivered.size() != C)
    fail("swipe_counts: delivered has " + std::to_string(delivered.size()) +
         " types, twin tracks " + std::to_string(C));
  SwipeCounts counts;
  counts.per_bin.assign(C, {});
  counts.delivered.assign(delivered.begin(), delivered.end());
  std::vector<int> events_per_type(C, 0);
  for (const SwipeEvent& ev : twin.swipes) {
    if (!(ev.timestamp > 0.0) || ev.timestamp > kSwipeBins)
      fail("swipe_counts: timestamp " + fmt(ev.timestamp) +
           " outside (0, 15]");
    if (ev.type < 1 || ev.type > static_cast<int>(C))
      fail("swipe_counts: type " + std::to_string(ev.type) + " out of range");
    const int bin = static_cast<int>(std::ceil(ev.timestamp));
    counts.per_bin[static_cast<std::size_t>(ev.type - 1)]
                  [static_cast<std::size_t>(bin - 1)] += 1;
    events_per_type[static_cast<std::size_t>(ev.type - 1)] += 1;
  }
  for (std::size_t c = 0; c < C; ++c) {
    if (events_per_type[c] > counts.delivered[c])
      fail("swipe_counts: type " + std::to_string(c + 1) + " has " +
           std::to_string(events_per_type[c]) + " events but only " +
           std::to_string(counts.delivered[c]) + " delivered");
  }
  return counts;
}

double update_swipe_distribution(double p_prev, double lambda, int A_e,
                                 int A_hat) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail("update_swipe_distribution: lambda outside [0, 1]");
  if (A_e < 0 || A_hat < 0 || A_e > A_hat)
    fail("update_swipe_distribution: need 0 <= A_e <= A_hat");
  const double empirical =
      A_hat == 0 ? p_prev : static_cast<double>(A_e) / A_hat;
  // Residual form of lambda*p + (1-lambda)*empirical; keeps the fixed point
  // (empirical == p_prev) exact in floating point.
  return p_prev + (1.0 - lambda) * (empirical - p_prev);
}

void apply_swipe_update(UserTwin& twin, const SwipeCounts& counts,
                        double lambda) {
  const std::size_t C = twin.swipe_dist.size();
  if (counts.per_bin.size() != C || counts.delivered.size() != C)
    fail("apply_swipe_update: type count mismatch");
  for (std::size_t c = 0; c < C; ++c) {
    for (int e = 0; e < kSwipeBins; ++e) {
      twin.swipe_dist[c][static_cast<std::size_t>(e)] =
          update_swipe_distribution(
              twin.swipe_dist[c][static_cast<std::size_t>(e)], lambda,
              counts.per_bin[c][static_cast<std::size_t>(e)],
              counts.delivered[c]);
    }
  }
}

std::string serialize_twins(std::span<const UserTwin> twins) {
  std::ostringstream os;
  for (const UserTwin& t : twins) {
    os << "twin " << t.user_id;
    os << " |h";
    for (double v : t.channel) os << ' ' << fmt(v);
    os << " |loc";
    for (const auto& p : t.location) os << ' ' << fmt(p[0]) << ',' << fmt(p[1]);
    os << " |sw";
    for (const auto& s : t.swipes)
      os << ' ' << s.video_id << ',' << s.type << ',' << fmt(s.timestamp);
    os << " |pref";
    for (const auto& sample : t.prefs) {
      os << ' ';
      for (std::size_t i = 0; i < sample.size(); ++i) {
        if (i) os << ',';
        os << fmt(sample[i]);
      }
    }
    os << " |dist";
    for (const auto& row : t.swipe_dist)
      for (double v : row) os << ' ' << fmt(v);
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) out.push_back(std::stod(cur));
  return out;
}

}  // namespace

std::vector<UserTwin> parse_twins(std::string_view text) {
  std::vector<UserTwin> twins;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    // Sections are separated by " |name".
    std::vector<std::pair<std::string, std::string>> sections;
    std::size_t pos = 0;
    std::string head;
    while (true) {
      const std::size_t bar = line.find(" |", pos);
      const std::string chunk = line.substr(pos, bar - pos);
      if (pos == 0) {
        head = chunk;
      } else {
        const std::size_t sp = chunk.find(' ');
        sections.emplace_back(chunk.substr(0, sp),
                              sp == std::string::npos ? "" : chunk.substr(sp + 1));
      }
      if (bar == std::string::npos) break;
      pos = bar + 2;
    }
    auto head_toks = split_ws(head);
    if (head_toks.size() != 2 || head_toks[0] != "twin")
      throw std::invalid_argument("parse_twins: bad record header: " + head);
    UserTwin t;
    t.user_id = std::stoi(head_toks[1]);
    for (auto& [name, body] : sections) {
      auto toks = split_ws(body);
      if (name == "h") {
        for (auto& tok : toks) t.channel.push_back(std::stod(tok));
      } else if (name == "loc") {
        for (auto& tok : toks) {
          auto xy = split_doubles(tok);
          if (xy.size() != 2)
            throw std::invalid_argument("parse_twins: bad location " + tok);
          t.location.push_back({xy[0], xy[1]});
        }
      } else if (name == "sw") {
        for (auto& tok : toks) {
          auto f = split_doubles(tok);
          if (f.size() != 3)
            throw std::invalid_argument("parse_twins: bad swipe " + tok);
          t.swipes.push_back({static_cast<int>(f[0]), static_cast<int>(f[1]),
                              f[2]});
        }
      } else if (name == "pref") {
        for (auto& tok : toks) t.prefs.push_back(split_doubles(tok));
      } else if (name == "dist") {
        if (toks.size() % kSwipeBins != 0)
          throw std::invalid_argument("parse_twins: dist length not a multiple of 15");
        const std::size_t C = toks.size() / kSwipeBins;
        t.swipe_dist.assign(C, {});
        for (std::size_t i = 0; i < toks.size(); ++i)
          t.swipe_dist[i / kSwipeBins][i % kSwipeBins] = std::stod(toks[i]);
      } else {
        throw std::invalid_argument("parse_twins: unknown section " + name);
      }
    }
    twins.push_back(std::move(t));
  }
  return twins;
}

}  // namespace twincast
