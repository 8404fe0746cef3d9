#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seismic/errors.hpp"

namespace seismic {

// One reshare event: time relative to the original post and the out-degree
// (follower count) of the resharing node.
struct Event {
  double time;           // seconds since the original post
  std::uint64_t degree;  // followers of the resharer
};

// The full observable history of one post: the original post at time 0
// followed by its reshares in time order.  Index 0 is always the originator.
struct Cascade {
  std::vector<Event> events;
  std::string id;

  bool operator==(const Cascade& o) const {
    if (id != o.id || events.size() != o.events.size()) return false;
    for (std::size_t i = 0; i < events.size(); ++i)
      if (events[i].time != o.events[i].time ||
          events[i].degree != o.events[i].degree)
        return false;
    return true;
  }
};

// Validates the cascade invariants; returns the input on success.
inline Cascade make_cascade(std::vector<Event> events, std::string id = "") {
  if (events.empty()) throw domain_error("cascade: no events");
  if (events.front().time != 0.0)
    throw domain_error("cascade: first event must be the original post at t=0");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].time >= 0.0) || !std::isfinite(events[i].time))
      throw domain_error("cascade: event times must be finite and nonnegative");
    if (i > 0 && events[i].time < events[i - 1].time)
      throw domain_error("cascade: event times decrease at index " +
                         std::to_string(i));
  }
  return Cascade{std::move(events), std::move(id)};
}

// Number of events (including the originator) with t_i <= t.
inline std::size_t events_by(const Cascade& c, double t) {
  auto it = std::upper_bound(
      c.events.begin(), c.events.end(), t,
      [](double v, const Event& e) { return v < e.time; });
  return static_cast<std::size_t>(it - c.events.begin());
}

// R_t: reshares by time t.  The originator does not count.
inline std::uint64_t reshare_count(const Cascade& c, double t) {
  const std::size_t k = events_by(c, t);
  return k > 0 ? static_cast<std::uint64_t>(k - 1) : 0;
}

// Final reshare count when the record is truncated at `horizon`.
inline std::uint64_t final_reshares(const Cascade& c, double horizon) {
  return reshare_count(c, horizon);
}

// A cascade together with its ground-truth final size, used for training
// and evaluation.
struct LabeledCascade {
  Cascade cascade;
  double r_inf;
};

}  // namespace seismic
