#include "slotune/testbed/flow_trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "slotune/error.hpp"

namespace slotune {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

FlowRecord parse_record(const std::string& line, std::size_t lineno) {
  std::int64_t f[8];
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (int i = 0; i < 8; ++i) {
    auto [next, ec] = std::from_chars(p, end, f[i]);
    if (ec != std::errc{})
      throw ParseError("line " + std::to_string(lineno) + ": field " + std::to_string(i + 1) +
                       " is not an integer");
    p = next;
    if (i < 7) {
      if (p == end || *p != ',')
        throw ParseError("line " + std::to_string(lineno) + ": expected 8 comma-separated fields");
      ++p;
    }
  }
  if (p != end) throw ParseError("line " + std::to_string(lineno) + ": trailing characters");
  FlowRecord r{f[0], f[1], f[2], f[3], f[4], f[5], static_cast<int>(f[6]), f[7]};
  if (r.end_ns < r.start_ns)
    throw ParseError("line " + std::to_string(lineno) + ": end_ns precedes start_ns");
  if (r.bytes < 1) throw ParseError("line " + std::to_string(lineno) + ": bytes must be >= 1");
  return r;
}

}  // namespace

WorkloadReplay read_flow_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  WorkloadReplay w;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != kFlowTraceHeader)
        throw ParseError("line " + std::to_string(lineno) + ": expected header '" +
                         kFlowTraceHeader + "'");
      header = true;
      continue;
    }
    w.flows.push_back(parse_record(line, lineno));
  }
  if (!header) throw ConfigError("flow trace is empty");
  if (w.flows.empty()) throw ConfigError("flow trace has no records");
  std::stable_sort(w.flows.begin(), w.flows.end(),
                   [](const FlowRecord& a, const FlowRecord& b) { return a.start_ns < b.start_ns; });
  for (const auto& r : w.flows) {
    w.bytes_per_dscp[r.dscp] += r.bytes;
    w.flows_per_dscp[r.dscp] += 1;
  }
  w.span_ns = w.flows.back().start_ns - w.flows.front().start_ns;
  return w;
}

WorkloadReplay read_flow_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open flow trace " + path);
  return read_flow_trace(in);
}

void write_flow_trace(std::ostream& out, std::span<const FlowRecord> flows) {
  out << kFlowTraceHeader << '\n';
  for (const auto& r : flows)
    out << r.start_ns << ',' << r.end_ns << ',' << r.src << ',' << r.dst << ',' << r.sport << ','
        << r.dport << ',' << r.dscp << ',' << r.bytes << '\n';
}

void write_flow_trace(const std::string& path, std::span<const FlowRecord> flows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write flow trace " + path);
  write_flow_trace(out, flows);
}

}  // namespace slotune
