#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dominating.hpp"

namespace bdswap {

// Malformed event-log input; line() is 1-based and counts the header.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, end);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(std::string_view s, std::size_t line, const char* column) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, std::string("bad number in column ") + column + ": '" + std::string(s) + "'");
  }
  return x;
}

inline std::uint64_t parse_uint(std::string_view s, std::size_t line, const char* column) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, std::string("bad integer in column ") + column + ": '" + std::string(s) + "'");
  }
  return x;
}

}  // namespace detail

inline std::string event_log_header(std::size_t dim) {
  std::string h = "index,time,kind,point_id";
  for (std::size_t k = 1; k <= dim; ++k) h += ",x" + std::to_string(k);
  h += ",mark,swap_uniform";
  return h;
}

// CSV with columns index,time,kind,point_id,x1..xd,mark,swap_uniform.
// time is empty in backward logs; mark and swap_uniform are empty on deaths.
inline std::string serialize_log(const std::vector<Event>& events, std::size_t dim) {
  std::ostringstream out;
  out << event_log_header(dim) << '\n';
  for (const auto& e : events) {
    out << e.index << ',';
    if (e.time) out << detail::format_double(*e.time);
    out << ',' << (e.kind == EventKind::birth ? "birth" : "death") << ',' << e.point.id;
    for (std::size_t k = 0; k < dim; ++k) out << ',' << detail::format_double(e.point.coords[k]);
    if (e.kind == EventKind::birth) {
      out << ',' << detail::format_double(e.mark) << ',' << detail::format_double(e.swap_uniform);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

inline std::string serialize_log(const EventLog& log, std::size_t dim) { return serialize_log(log.events, dim); }

inline std::vector<Event> parse_log(std::string_view text, std::size_t dim) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  const std::size_t columns = 6 + dim;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != event_log_header(dim)) throw ParseError(line_no, "unexpected header");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, got " + std::to_string(f.size()));
    }
    Event e;
    e.index = detail::parse_uint(f[0], line_no, "index");
    if (!f[1].empty()) e.time = detail::parse_double(f[1], line_no, "time");
    if (f[2] == "birth") {
      e.kind = EventKind::birth;
    } else if (f[2] == "death") {
      e.kind = EventKind::death;
    } else {
      throw ParseError(line_no, "kind must be birth or death");
    }
    e.point.id = detail::parse_uint(f[3], line_no, "point_id");
    for (std::size_t k = 0; k < dim; ++k) e.point.coords[k] = detail::parse_double(f[4 + k], line_no, "x");
    const auto mark = f[4 + dim];
    const auto swap = f[5 + dim];
    if (e.kind == EventKind::birth) {
      if (mark.empty() || swap.empty()) throw ParseError(line_no, "birth rows need mark and swap_uniform");
      e.mark = detail::parse_double(mark, line_no, "mark");
      e.swap_uniform = detail::parse_double(swap, line_no, "swap_uniform");
      if (!(e.mark >= 0.0 && e.mark <= 1.0) || !(e.swap_uniform >= 0.0 && e.swap_uniform <= 1.0)) {
        throw ParseError(line_no, "mark and swap_uniform must lie in [0, 1]");
      }
    } else if (!mark.empty() || !swap.empty()) {
      throw ParseError(line_no, "death rows must not carry mark or swap_uniform");
    }
    events.push_back(e);
  }
  if (!saw_header) throw ParseError(1, "missing header");
  return events;
}

// Infers the direction from the time column: all present is forward, all
// absent is backward. An empty log is reported as backward.
inline LogDirection infer_direction(const std::vector<Event>& events) {
  bool any_time = false, any_missing = false;
  for (const auto& e : events) (e.time ? any_time : any_missing) = true;
  if (any_time && any_missing) throw std::invalid_argument("log mixes timed and untimed rows");
  return any_time ? LogDirection::forward : LogDirection::backward;
}

}  // namespace bdswap
