#pragma once

// Flow-trace files: UTF-8 CSV with the header
//   start_ns,end_ns,src,dst,sport,dport,dscp,bytes
// and one integer-only record per line.

#include <iosfwd>
#include <span>
#include <string>

#include "slotune/testbed/workload.hpp"

namespace slotune {

inline constexpr const char* kFlowTraceHeader = "start_ns,end_ns,src,dst,sport,dport,dscp,bytes";

/// Throws ParseError (with line number) on malformed input and ConfigError
/// when the file holds no records.
WorkloadReplay read_flow_trace(std::istream& in);
WorkloadReplay read_flow_trace(const std::string& path);

void write_flow_trace(std::ostream& out, std::span<const FlowRecord> flows);
void write_flow_trace(const std::string& path, std::span<const FlowRecord> flows);

}  // namespace slotune
