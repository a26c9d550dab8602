#pragma once

// Turn timing against oracle times.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pageflip/error.hpp"
#include "pageflip/session.hpp"

namespace pageflip {

struct PageOffset {
  int page = 0;
  std::optional<double> offset_sec;  // actual - oracle; empty when missed
};

struct TurnMetrics {
  std::vector<PageOffset> pages;
  int missed_pages = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
};

// oracle_times[p] is the expected absolute turn time of page p, one entry
// per non-final page.
inline TurnMetrics evaluate_turns(const SessionLog& log, const std::vector<double>& oracle_times) {
  TurnMetrics m;
  for (std::size_t p = 0; p < oracle_times.size(); ++p) m.pages.push_back({static_cast<int>(p), {}});

  for (const SessionEvent& e : log.events) {
    if (std::holds_alternative<AcceptEvent>(e)) {
      ++m.accepted;
    } else if (std::holds_alternative<RejectEvent>(e)) {
      ++m.rejected;
    } else if (const auto* turn = std::get_if<PageTurnEvent>(&e)) {
      if (turn->from_page < 0 || turn->from_page >= static_cast<int>(oracle_times.size())) {
        throw LogMismatch("turn from page " + std::to_string(turn->from_page) +
                          " has no oracle entry (" + std::to_string(oracle_times.size()) +
                          " pages in oracle)");
      }
      PageOffset& slot = m.pages[static_cast<std::size_t>(turn->from_page)];
      if (slot.offset_sec) {
        throw LogMismatch("page " + std::to_string(turn->from_page) + " turned more than once");
      }
      slot.offset_sec = turn->t - oracle_times[static_cast<std::size_t>(turn->from_page)];
    }
  }
  for (const PageOffset& p : m.pages) m.missed_pages += p.offset_sec ? 0 : 1;
  return m;
}

inline nlohmann::ordered_json metrics_to_json(const TurnMetrics& m) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::array();
  for (const PageOffset& p : m.pages) {
    nlohmann::ordered_json j{{"page", p.page}};
    if (p.offset_sec) {
      j["offset_sec"] = *p.offset_sec;
    } else {
      j["missed"] = true;
    }
    pages.push_back(j);
  }
  return {{"pages", pages},
          {"missed_pages", m.missed_pages},
          {"accepted", m.accepted},
          {"rejected", m.rejected}};
}

// {"pages": [{"page": int, "turn_t": number}, ...]}
inline nlohmann::ordered_json oracle_to_json(const std::vector<double>& times) {
  nlohmann::ordered_json pages = nlohmann::ordered_json::array();
  for (std::size_t p = 0; p < times.size(); ++p) {
    pages.push_back({{"page", static_cast<int>(p)}, {"turn_t", times[p]}});
  }
  return {{"pages", pages}};
}

inline std::vector<double> oracle_from_json(const nlohmann::json& j) {
  std::vector<std::optional<double>> slots;
  try {
    for (const auto& e : j.at("pages")) {
      const int page = e.at("page").get<int>();
      if (page < 0) throw Error("oracle page index must be >= 0");
      if (static_cast<std::size_t>(page) >= slots.size()) slots.resize(static_cast<std::size_t>(page) + 1);
      if (slots[static_cast<std::size_t>(page)]) {
        throw Error("oracle lists page " + std::to_string(page) + " twice");
      }
      slots[static_cast<std::size_t>(page)] = e.at("turn_t").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed oracle JSON: ") + e.what());
  }
  std::vector<double> out;
  for (std::size_t p = 0; p < slots.size(); ++p) {
    if (!slots[p]) throw Error("oracle is missing page " + std::to_string(p));
    out.push_back(*slots[p]);
  }
  return out;
}

inline std::vector<double> read_oracle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open oracle " + path);
  try {
    return oracle_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace pageflip
