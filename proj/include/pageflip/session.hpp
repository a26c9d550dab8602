#pragma once

// Session loop: tracker source -> filter -> policy -> device, one prediction
// at a time, on the logical clock given by prediction timestamps.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pageflip/device.hpp"
#include "pageflip/error.hpp"
#include "pageflip/filter.hpp"
#include "pageflip/layout.hpp"
#include "pageflip/policy.hpp"

namespace pageflip {

struct SessionConfig {
  double rate_hz = 20.0;
  double blackout_sec = 1.0;
  int device_timeout_ms = 500;
  bool realtime = false;  // pace ticks to the wall clock; logged times unchanged
  FilterConfig filter;
  PolicyConfig policy;

  void validate() const {
    if (!(rate_hz > 0.0)) throw BadConfig("rate_hz must be > 0");
    if (!(blackout_sec > 0.0)) throw BadConfig("blackout_sec must be > 0");
    if (device_timeout_ms <= 0) throw BadConfig("device_timeout_ms must be > 0");
    filter.validate();
    policy.validate();
  }
};

class TrackerSource {
 public:
  virtual ~TrackerSource() = default;
  virtual std::optional<TrackerPrediction> next() = 0;
};

class VectorSource : public TrackerSource {
 public:
  explicit VectorSource(std::vector<TrackerPrediction> preds) : preds_(std::move(preds)) {}

  std::optional<TrackerPrediction> next() override {
    if (pos_ >= preds_.size()) return std::nullopt;
    return preds_[pos_++];
  }

 private:
  std::vector<TrackerPrediction> preds_;
  std::size_t pos_ = 0;
};

// Log events. `t` is the session clock in seconds.

struct AcceptEvent {
  double t = 0.0;
  ReadingPosition position;
  double conf = 0.0;
};

struct RejectEvent {
  double t = 0.0;
  int page = 0;
  std::string reason;  // filter reason, or "blackout"
};

struct PageTurnEvent {
  double t = 0.0;
  int from_page = 0;
  int to_page = 0;
  PolicyKind policy_kind = PolicyKind::Halfway;
  ReadingPosition trigger;
  double device_latency_ms = 0.0;
};

struct DeviceAckEvent {
  double t = 0.0;
  int page = 0;
  double latency_ms = 0.0;
};

struct DeviceTimeoutEvent {
  double t = 0.0;
  int page = 0;
  std::string detail;
};

struct PageResetEvent {
  double t = 0.0;
  int page = 0;
};

struct WarningEvent {
  double t = 0.0;
  int page = 0;
  std::string message;
};

using SessionEvent = std::variant<AcceptEvent, RejectEvent, PageTurnEvent, DeviceAckEvent,
                                  DeviceTimeoutEvent, PageResetEvent, WarningEvent>;

inline constexpr const char* kBlackoutReason = "blackout";
inline constexpr const char* kNoNextPage = "no_next_page";

struct SessionLog {
  std::vector<SessionEvent> events;

  template <typename E>
  std::vector<E> of() const {
    std::vector<E> out;
    for (const SessionEvent& e : events) {
      if (const E* p = std::get_if<E>(&e)) out.push_back(*p);
    }
    return out;
  }
  std::vector<PageTurnEvent> turns() const { return of<PageTurnEvent>(); }
};

inline double event_time(const SessionEvent& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

// ---- JSONL encoding -------------------------------------------------------

inline nlohmann::ordered_json position_to_json(const ReadingPosition& p) {
  return {{"page", p.page_index}, {"system", p.system_index}, {"x", p.x},
          {"frac_in_system", p.frac_in_system}, {"frac_page", p.frac_page}, {"t", p.t}};
}

inline ReadingPosition position_from_json(const nlohmann::json& j) {
  return {j.at("page").get<int>(), j.at("system").get<int>(), j.at("x").get<double>(),
          j.at("frac_in_system").get<double>(), j.at("frac_page").get<double>(),
          j.at("t").get<double>()};
}

inline nlohmann::ordered_json event_to_json(const SessionEvent& event) {
  using J = nlohmann::ordered_json;
  return std::visit(
      [](const auto& e) -> J {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, AcceptEvent>) {
          return {{"t", e.t}, {"kind", "accept"}, {"page", e.position.page_index},
                  {"system", e.position.system_index}, {"x", e.position.x},
                  {"frac_in_system", e.position.frac_in_system},
                  {"frac_page", e.position.frac_page}, {"conf", e.conf}};
        } else if constexpr (std::is_same_v<E, RejectEvent>) {
          return {{"t", e.t}, {"kind", "reject"}, {"page", e.page}, {"reason", e.reason}};
        } else if constexpr (std::is_same_v<E, PageTurnEvent>) {
          return {{"t", e.t}, {"kind", "turn"}, {"from_page", e.from_page}, {"to_page", e.to_page},
                  {"policy", std::string(to_string(e.policy_kind))},
                  {"trigger", position_to_json(e.trigger)},
                  {"device_latency_ms", e.device_latency_ms}};
        } else if constexpr (std::is_same_v<E, DeviceAckEvent>) {
          return {{"t", e.t}, {"kind", "device_ack"}, {"page", e.page}, {"latency_ms", e.latency_ms}};
        } else if constexpr (std::is_same_v<E, DeviceTimeoutEvent>) {
          return {{"t", e.t}, {"kind", "device_timeout"}, {"page", e.page}, {"detail", e.detail}};
        } else if constexpr (std::is_same_v<E, PageResetEvent>) {
          return {{"t", e.t}, {"kind", "page_reset"}, {"page", e.page}};
        } else {
          return {{"t", e.t}, {"kind", "warning"}, {"page", e.page}, {"message", e.message}};
        }
      },
      event);
}

inline SessionEvent event_from_json(const nlohmann::json& j) {
  const double t = j.at("t").get<double>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "accept") {
    ReadingPosition p{j.at("page").get<int>(), j.at("system").get<int>(), j.at("x").get<double>(),
                      j.at("frac_in_system").get<double>(), j.at("frac_page").get<double>(), t};
    return AcceptEvent{t, p, j.at("conf").get<double>()};
  }
  if (kind == "reject") return RejectEvent{t, j.at("page").get<int>(), j.at("reason").get<std::string>()};
  if (kind == "turn") {
    return PageTurnEvent{t,
                         j.at("from_page").get<int>(),
                         j.at("to_page").get<int>(),
                         parse_policy_kind(j.at("policy").get<std::string>()),
                         position_from_json(j.at("trigger")),
                         j.at("device_latency_ms").get<double>()};
  }
  if (kind == "device_ack") {
    return DeviceAckEvent{t, j.at("page").get<int>(), j.at("latency_ms").get<double>()};
  }
  if (kind == "device_timeout") {
    return DeviceTimeoutEvent{t, j.at("page").get<int>(), j.value("detail", std::string{})};
  }
  if (kind == "page_reset") return PageResetEvent{t, j.at("page").get<int>()};
  if (kind == "warning") {
    return WarningEvent{t, j.at("page").get<int>(), j.at("message").get<std::string>()};
  }
  throw std::invalid_argument("unknown event kind '" + kind + "'");
}

inline void write_log(std::ostream& out, const SessionLog& log) {
  for (const SessionEvent& e : log.events) out << event_to_json(e).dump() << '\n';
}

inline SessionLog read_log(std::istream& in) {
  SessionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.events.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return log;
}

inline SessionLog read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log " + path);
  return read_log(in);
}

// ---- the loop -------------------------------------------------------------

inline SessionLog run_session(const std::vector<PageLayout>& layouts, TrackerSource& source,
                              const SessionConfig& cfg, TurnDevice& device) {
  cfg.validate();
  if (layouts.empty()) throw BadConfig("session needs at least one page layout");

  SessionLog log;
  auto emit = [&](SessionEvent e) { log.events.push_back(std::move(e)); };

  int page = 0;
  FilterState filter = reset_for_page(page, layouts[0]);
  PolicyState policy;
  std::optional<double> blackout_until;
  std::optional<double> clock;

  using WallClock = std::chrono::steady_clock;
  const auto wall_start = WallClock::now();
  double first_t = 0.0;

  while (const std::optional<TrackerPrediction> pred = source.next()) {
    if (!clock) {
      first_t = pred->t;
      clock = pred->t;
      emit(PageResetEvent{*clock, page});
    }
    clock = std::max(*clock, pred->t);
    const double now = *clock;
    if (cfg.realtime) {
      std::this_thread::sleep_until(wall_start +
                                    std::chrono::duration_cast<WallClock::duration>(
                                        std::chrono::duration<double>(pred->t - first_t)));
    }

    if (blackout_until && pred->t < *blackout_until) {
      emit(RejectEvent{now, page, kBlackoutReason});
      continue;
    }

    const PageLayout& layout = layouts[static_cast<std::size_t>(page)];
    FilterStep step = filter_step(filter, *pred, layout, cfg.filter);
    filter = step.state;
    if (const auto* rej = std::get_if<Reject>(&step.outcome)) {
      emit(RejectEvent{now, page, std::string(to_string(rej->reason))});
      continue;
    }
    const ReadingPosition& pos = std::get<Accept>(step.outcome).position;
    emit(AcceptEvent{now, pos, pred->conf});

    PolicyStep decision = policy_step(std::move(policy), pos, layout, cfg.policy);
    policy = std::move(decision.state);
    if (!decision.decision.is_turn()) continue;

    if (page + 1 >= static_cast<int>(layouts.size())) {
      emit(WarningEvent{now, page, kNoNextPage});
      continue;
    }
    try {
      const DeviceAck ack = device.turn_page();
      emit(DeviceAckEvent{now, page, ack.latency_ms});
      emit(PageTurnEvent{now, page, page + 1, cfg.policy.kind, pos, ack.latency_ms});
    } catch (const DeviceTimeout& e) {
      emit(DeviceTimeoutEvent{now, page, e.what()});
      policy.turned = false;
      continue;
    } catch (const DeviceIo& e) {
      emit(WarningEvent{now, page, std::string("device_io: ") + e.what()});
      policy.turned = false;
      continue;
    }
    ++page;
    filter = reset_for_page(page, layouts[static_cast<std::size_t>(page)]);
    filter.last_t = now;
    policy = PolicyState{};
    blackout_until = now + cfg.blackout_sec;
    emit(PageResetEvent{now, page});
  }
  return log;
}

}  // namespace pageflip
