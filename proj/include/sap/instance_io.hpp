#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"
#include "sap/matching.hpp"
#include "sap/rational.hpp"

namespace sap {

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::int64_t parse_int(std::string_view w, std::size_t line, const char* what) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || p != w.data() + w.size() || v < 0)
    throw ParseError(line, std::string("expected a non-negative integer for ") + what + ", got '" + std::string(w) + "'");
  return v;
}

}  // namespace detail

/// Reads the text instance format:
///
///   servers <S>
///   capacity <server> <u>        (optional; all servers or none)
///   client <id> <s1> <s2> ...    (one per arrival, ids 0, 1, 2, ...)
///
/// `#` starts a comment. Neighbor lists must be strictly ascending.
inline ArrivalInstance read_instance(std::istream& in) {
  std::optional<std::size_t> servers;
  std::vector<std::optional<std::int32_t>> caps;
  std::size_t cap_lines = 0;
  std::vector<std::vector<ServerId>> arrivals;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t last_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto w = detail::split_words(line);
    if (w.empty()) continue;
    last_line = line_no;
    if (w[0] == "servers") {
      if (servers) throw ParseError(line_no, "duplicate 'servers' line");
      if (w.size() != 2) throw ParseError(line_no, "'servers' takes one argument");
      servers = static_cast<std::size_t>(detail::parse_int(w[1], line_no, "server count"));
      caps.assign(*servers, std::nullopt);
    } else if (w[0] == "capacity") {
      if (!servers) throw ParseError(line_no, "'capacity' before 'servers'");
      if (!arrivals.empty()) throw ParseError(line_no, "'capacity' after the first client");
      if (w.size() != 3) throw ParseError(line_no, "'capacity' takes a server and a value");
      const auto s = detail::parse_int(w[1], line_no, "server");
      const auto u = detail::parse_int(w[2], line_no, "capacity");
      if (static_cast<std::size_t>(s) >= *servers) throw ParseError(line_no, "server " + std::to_string(s) + " out of range");
      if (u < 1) throw ParseError(line_no, "capacity must be >= 1");
      if (u > INT32_MAX) throw ParseError(line_no, "capacity too large");
      if (caps[static_cast<std::size_t>(s)]) throw ParseError(line_no, "duplicate capacity for server " + std::to_string(s));
      caps[static_cast<std::size_t>(s)] = static_cast<std::int32_t>(u);
      ++cap_lines;
    } else if (w[0] == "client") {
      if (!servers) throw ParseError(line_no, "'client' before 'servers'");
      if (w.size() < 2) throw ParseError(line_no, "'client' needs an id");
      const auto id = detail::parse_int(w[1], line_no, "client id");
      if (static_cast<std::size_t>(id) != arrivals.size())
        throw ParseError(line_no, "client id " + std::to_string(id) + " out of order (expected " +
                                      std::to_string(arrivals.size()) + ")");
      std::vector<ServerId> nb;
      for (std::size_t k = 2; k < w.size(); ++k) {
        const auto s = detail::parse_int(w[k], line_no, "neighbor");
        if (static_cast<std::size_t>(s) >= *servers) throw ParseError(line_no, "neighbor " + std::to_string(s) + " out of range");
        if (!nb.empty() && nb.back() >= s) throw ParseError(line_no, "neighbor list must be strictly ascending");
        nb.push_back(static_cast<ServerId>(s));
      }
      arrivals.push_back(std::move(nb));
    } else {
      throw ParseError(line_no, "unknown directive '" + std::string(w[0]) + "'");
    }
  }
  if (!servers) throw ParseError(line_no, "missing 'servers' line");
  std::optional<std::vector<std::int32_t>> capacities;
  if (cap_lines > 0) {
    if (cap_lines != *servers) throw ParseError(last_line, "capacity lines must cover every server");
    capacities.emplace();
    for (const auto& u : caps) capacities->push_back(*u);
  }
  return ArrivalInstance(*servers, std::move(arrivals), std::move(capacities));
}

inline ArrivalInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return read_instance(in);
}

/// Canonical text form; read_instance(write_instance(x)) == x.
inline void write_instance(std::ostream& out, const ArrivalInstance& instance) {
  out << "servers " << instance.server_count() << '\n';
  if (instance.has_capacities())
    for (std::size_t s = 0; s < instance.server_count(); ++s)
      out << "capacity " << s << ' ' << instance.capacity(static_cast<ServerId>(s)) << '\n';
  for (std::size_t c = 0; c < instance.client_count(); ++c) {
    out << "client " << c;
    for (ServerId s : instance.neighbors(static_cast<ClientId>(c))) out << ' ' << s;
    out << '\n';
  }
}

inline std::string format_instance(const ArrivalInstance& instance) {
  std::ostringstream out;
  write_instance(out, instance);
  return out.str();
}

/// Per-arrival analysis columns.
struct AnalysisRow {
  Rational max_alpha;
  std::int32_t opt_load = 0;
};

inline constexpr std::string_view kTelemetryHeader =
    "arrival,client,matched,path_edges,replacements,cum_replacements,cum_path_edges,engine";

/// One row per arrival. `path_edges` is empty for unmatched arrivals.
inline void write_telemetry(std::ostream& out, const RunLog& log, std::string_view engine,
                            const std::vector<AnalysisRow>* analysis = nullptr) {
  if (analysis && analysis->size() != log.records().size()) throw UsageError("analysis rows do not match the log");
  out << kTelemetryHeader;
  if (analysis) out << ",max_alpha_num,max_alpha_den,opt_load";
  out << '\n';
  std::int64_t rep = 0, edges = 0;
  for (std::size_t i = 0; i < log.records().size(); ++i) {
    const auto& r = log.records()[i];
    rep += r.replacements;
    edges += r.path_edges.value_or(0);
    out << i << ',' << r.client << ',' << (r.matched ? 1 : 0) << ',';
    if (r.path_edges) out << *r.path_edges;
    out << ',' << r.replacements << ',' << rep << ',' << edges << ',' << engine;
    if (analysis) {
      const auto& a = (*analysis)[i];
      out << ',' << a.max_alpha.num() << ',' << a.max_alpha.den() << ',' << a.opt_load;
    }
    out << '\n';
  }
}

}  // namespace sap
