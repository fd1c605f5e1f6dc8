#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "slotune/error.hpp"
#include "slotune/harness.hpp"

namespace slotune {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> class_labels(const SloSpec& slo) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < slo.num_classes(); ++i)
    out.push_back(i < slo.labels.size() && !slo.labels[i].empty() ? slo.labels[i] : std::to_string(i));
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError("line " + std::to_string(lineno) + ": '" + s + "' is not a number");
  return v;
}

std::size_t to_index(const std::string& s, std::size_t lineno) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError("line " + std::to_string(lineno) + ": '" + s + "' is not an index");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::string> trace_columns(const ScenarioConfig& config) {
  std::vector<std::string> cols{"iteration", "phase"};
  for (const auto& l : config.space.labels()) cols.push_back("x_" + l);
  const auto cls = class_labels(config.slo);
  for (const auto& c : cls) cols.push_back("sli_raw_" + c);
  for (const auto& c : cls) cols.push_back("sli_smooth_" + c);
  for (const char* c : {"g", "f", "residual", "g_best", "dist_to_best", "ei", "admitted",
                        "regime_shift", "compliant", "status"})
    cols.emplace_back(c);
  return cols;
}

void write_trace_csv(std::ostream& out, const ScenarioConfig& config,
                     const std::vector<IterationTrace>& trace) {
  const auto cols = trace_columns(config);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& t : trace) {
    out << t.iteration << ',' << t.phase;
    for (double v : t.x) out << ',' << fmt(v);
    for (double v : t.raw) out << ',' << fmt(v);
    for (double v : t.smoothed) out << ',' << fmt(v);
    for (double v : {t.g, t.f, t.residual, t.g_best, t.distance_to_best, t.ei}) out << ',' << fmt(v);
    out << ',' << int(t.admitted) << ',' << int(t.regime_shift) << ',' << int(t.compliant) << ','
        << t.status << '\n';
  }
}

std::string trace_csv(const ScenarioConfig& config, const std::vector<IterationTrace>& trace) {
  std::ostringstream os;
  write_trace_csv(os, config, trace);
  return os.str();
}

std::vector<IterationTrace> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::vector<std::size_t> xs, raws, smooths;
  std::size_t idx[12];
  const char* fixed[] = {"iteration", "phase", "g", "f", "residual", "g_best", "dist_to_best",
                         "ei", "admitted", "regime_shift", "compliant", "status"};
  for (auto& v : idx) v = SIZE_MAX;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("x_", 0) == 0) xs.push_back(c);
    else if (h.rfind("sli_raw_", 0) == 0) raws.push_back(c);
    else if (h.rfind("sli_smooth_", 0) == 0) smooths.push_back(c);
    for (std::size_t k = 0; k < std::size(fixed); ++k)
      if (h == fixed[k]) idx[k] = c;
  }
  for (std::size_t k = 0; k < std::size(fixed); ++k)
    if (idx[k] == SIZE_MAX) throw ParseError(std::string("line 1: missing column '") + fixed[k] + "'");
  if (raws.size() != smooths.size() || raws.empty())
    throw ParseError("line 1: raw and smoothed SLI columns do not match");

  std::vector<IterationTrace> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    IterationTrace t;
    t.iteration = to_index(cells[idx[0]], lineno);
    t.phase = to_index(cells[idx[1]], lineno);
    for (auto c : xs) t.x.push_back(to_double(cells[c], lineno));
    for (auto c : raws) t.raw.push_back(to_double(cells[c], lineno));
    for (auto c : smooths) t.smoothed.push_back(to_double(cells[c], lineno));
    t.g = to_double(cells[idx[2]], lineno);
    t.f = to_double(cells[idx[3]], lineno);
    t.residual = to_double(cells[idx[4]], lineno);
    t.g_best = to_double(cells[idx[5]], lineno);
    t.distance_to_best = to_double(cells[idx[6]], lineno);
    t.ei = to_double(cells[idx[7]], lineno);
    t.admitted = to_index(cells[idx[8]], lineno) != 0;
    t.regime_shift = to_index(cells[idx[9]], lineno) != 0;
    t.compliant = to_index(cells[idx[10]], lineno) != 0;
    t.status = cells[idx[11]];
    if (!out.empty() && t.iteration <= out.back().iteration)
      throw ParseError("line " + std::to_string(lineno) + ": iteration index is not increasing");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<IterationTrace> read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace " + path);
  return read_trace_csv(in);
}

}  // namespace slotune
