#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "random.hpp"

namespace bdswap {

// Forward-time meaning of a dominating event, whichever direction it was
// generated in.
enum class EventKind { birth, death };

struct Event {
  std::uint64_t index = 0;       // 1-based row within its log
  std::optional<double> time;    // forward logs only
  EventKind kind = EventKind::birth;
  Point point;                   // coords are carried for deaths too
  double mark = 0.0;             // births only
  double swap_uniform = 0.0;     // births only

  friend bool operator==(const Event& a, const Event& b) noexcept {
    return a.index == b.index && a.time == b.time && a.kind == b.kind && a.point.id == b.point.id &&
           a.point.coords == b.point.coords && a.mark == b.mark && a.swap_uniform == b.swap_uniform;
  }
};

enum class LogDirection { forward, backward };

// Forward logs store events oldest first, starting from `anchor`.
// Backward logs store row 1 as the event nearest to time 0 going into the
// past; `anchor` is D(0).
struct EventLog {
  LogDirection direction = LogDirection::forward;
  Configuration anchor;
  std::vector<Event> events;
};

// Events oldest-first regardless of generation direction. For a backward log
// of k rows this yields rows k, k-1, ..., 1.
inline std::vector<std::reference_wrapper<const Event>> replay_order(const EventLog& log) {
  std::vector<std::reference_wrapper<const Event>> out(log.events.begin(), log.events.end());
  if (log.direction == LogDirection::backward) std::reverse(out.begin(), out.end());
  return out;
}

// Steps D forward through one event.
inline void apply_dominating_event(Configuration& dominating, const Event& e) {
  if (e.kind == EventKind::birth) {
    dominating.insert(e.point);
  } else if (!dominating.erase(e.point.id)) {
    throw std::invalid_argument("death of point " + std::to_string(e.point.id) + " that is not alive");
  }
}

// Steps D backward through one event (undoes it).
inline void undo_dominating_event(Configuration& dominating, const Event& e) {
  if (e.kind == EventKind::death) {
    dominating.insert(e.point);
  } else if (!dominating.erase(e.point.id)) {
    throw std::invalid_argument("birth of point " + std::to_string(e.point.id) + " missing from later state");
  }
}

namespace detail {

inline Event birth_event(std::uint64_t index, const Point& p, RandomStream& stream) {
  Event e;
  e.index = index;
  e.kind = EventKind::birth;
  e.point = p;
  e.mark = stream.uniform();
  e.swap_uniform = stream.uniform();
  return e;
}

inline Event death_event(std::uint64_t index, const Point& p) {
  Event e;
  e.index = index;
  e.kind = EventKind::death;
  e.point = p;
  return e;
}

}  // namespace detail

// D(0): Poisson process of intensity K on the window.
inline Configuration start_dominating(const Window& window, double intensity, std::uint64_t seed, IdCounter& ids) {
  RandomStream stream(seed, StreamPurpose::initial_state);
  return poisson_point_process(window, intensity, stream, ids);
}

// Runs the dominating birth-death process forward for n_events: births at
// total rate K|S|, each point dying at rate 1. Event i draws from its own
// stream keyed by first_index + i. Rows carry the time at which the event
// happens.
inline std::pair<Configuration, EventLog> simulate_forward(Configuration config, std::size_t n_events, double intensity,
                                                           const Window& window, std::uint64_t seed, IdCounter& ids,
                                                           std::uint64_t first_index = 1, double start_time = 0.0) {
  if (!(intensity > 0.0)) throw std::invalid_argument("dominating intensity must be positive");
  EventLog log;
  log.direction = LogDirection::forward;
  log.anchor = config;
  log.events.reserve(n_events);
  const double birth_rate = intensity * window.volume();
  double t = start_time;
  for (std::size_t i = 0; i < n_events; ++i) {
    const std::uint64_t index = first_index + i;
    RandomStream stream(seed, StreamPurpose::forward_event, index);
    const double t_birth = stream.exponential(birth_rate);
    const double t_death = stream.exponential(static_cast<double>(config.size()));
    Event e;
    if (t_birth < t_death) {
      const Point v = draw_uniform_point(window, stream, ids);
      e = detail::birth_event(index, v, stream);
      config.insert(v);
    } else {
      const Point w = config.at_position(stream.index_below(config.size()));
      e = detail::death_event(index, w);
      config.erase(w.id);
    }
    t += std::min(t_birth, t_death);
    e.index = log.events.size() + 1;
    e.time = t;
    log.events.push_back(e);
  }
  return {std::move(config), std::move(log)};
}

// Generates n_events further into the past from `config` (the earliest state
// known so far). With rate K|S| the step records a forward-time death and adds
// the point to the earlier state; with rate #x it records a forward-time birth
// and removes that point. Returns the earlier state and the new rows, which
// carry indices first_index, first_index + 1, ...
inline std::pair<Configuration, std::vector<Event>> extend_backward(Configuration config, std::size_t n_events,
                                                                    double intensity, const Window& window,
                                                                    std::uint64_t seed, IdCounter& ids,
                                                                    std::uint64_t first_index = 1) {
  if (!(intensity > 0.0)) throw std::invalid_argument("dominating intensity must be positive");
  std::vector<Event> rows;
  rows.reserve(n_events);
  const double add_rate = intensity * window.volume();
  for (std::size_t i = 0; i < n_events; ++i) {
    const std::uint64_t index = first_index + i;
    RandomStream stream(seed, StreamPurpose::backward_event, index);
    const double total = add_rate + static_cast<double>(config.size());
    if (stream.uniform() * total < add_rate) {
      const Point v = draw_uniform_point(window, stream, ids);
      config.insert(v);
      rows.push_back(detail::death_event(index, v));
    } else {
      const Point w = config.at_position(stream.index_below(config.size()));
      config.erase(w.id);
      rows.push_back(detail::birth_event(index, w, stream));
    }
  }
  return {std::move(config), std::move(rows)};
}

// D(tau_n): the state before the n rows of a backward log nearest time 0.
inline Configuration state_at_backward_depth(const EventLog& log, std::size_t n) {
  if (log.direction != LogDirection::backward) throw std::invalid_argument("log is not a backward log");
  if (n > log.events.size()) throw std::out_of_range("backward log shorter than requested depth");
  Configuration state = log.anchor;
  for (std::size_t i = 0; i < n; ++i) undo_dominating_event(state, log.events[i]);
  return state;
}

// Order-sensitive FNV-1a digest of one event row.
inline std::uint64_t row_hash(const Event& e) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int kind = e.kind == EventKind::birth ? 1 : 2;
  const double time = e.time.value_or(-1.0);
  mix(&e.index, sizeof e.index);
  mix(&time, sizeof time);
  mix(&kind, sizeof kind);
  mix(&e.point.id, sizeof e.point.id);
  mix(e.point.coords.data(), sizeof(double) * e.point.coords.size());
  mix(&e.mark, sizeof e.mark);
  mix(&e.swap_uniform, sizeof e.swap_uniform);
  return h;
}

inline std::uint64_t log_hash(const std::vector<Event>& events, std::size_t first_rows) noexcept {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (std::size_t i = 0; i < first_rows && i < events.size(); ++i) h = detail::splitmix64(h ^ row_hash(events[i]));
  return h;
}

}  // namespace bdswap
