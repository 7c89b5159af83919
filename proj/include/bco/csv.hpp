#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bco/errors.hpp"

namespace bco {

// One result row. Aggregate rows use seed = -1 and iteration = -1.
struct ResultRow {
  std::string env;
  double alpha = 0.0;
  int demos = 0;
  std::int64_t seed = 0;
  int iteration = 0;
  std::int64_t pre_interactions = 0;
  std::int64_t post_interactions_cum = 0;
  double raw_return = 0.0;
  double scaled_return = 0.0;
  double stderr_return = 0.0;
  std::int64_t wall_ms = 0;
};

inline const char* kResultHeader =
    "env,alpha,demos,seed,iteration,pre_interactions,post_interactions_cum,"
    "raw_return,scaled_return,stderr,wall_ms";

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_row(const ResultRow& r) {
  std::ostringstream ss;
  ss << r.env << ',' << format_double(r.alpha) << ',' << r.demos << ',' << r.seed << ','
     << r.iteration << ',' << r.pre_interactions << ',' << r.post_interactions_cum << ','
     << format_double(r.raw_return) << ',' << format_double(r.scaled_return) << ','
     << format_double(r.stderr_return) << ',' << r.wall_ms;
  return ss.str();
}

// Appends rows one at a time and flushes after each, so a killed run leaves
// a readable file with every finished row. The header is written only when
// the file starts empty.
class ResultWriter {
 public:
  explicit ResultWriter(const std::string& path) : path_(path) {
    bool need_header = true;
    {
      std::ifstream probe(path, std::ios::binary | std::ios::ate);
      if (probe && probe.tellg() > 0) need_header = false;
    }
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw InputError("cannot open results file: " + path);
    if (need_header) {
      out_ << kResultHeader << '\n';
      out_.flush();
    }
  }

  void append(const ResultRow& r) {
    out_ << format_row(r) << '\n';
    out_.flush();
    if (!out_) throw InputError("short write to results file: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

// Minimal reader for the fixed-column format above.
inline std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("results file is empty: " + path);
  if (line != kResultHeader) throw InputError("results file has an unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw InputError("results row with wrong column count");
    ResultRow r;
    r.env = cells[0];
    r.alpha = std::stod(cells[1]);
    r.demos = std::stoi(cells[2]);
    r.seed = std::stoll(cells[3]);
    r.iteration = std::stoi(cells[4]);
    r.pre_interactions = std::stoll(cells[5]);
    r.post_interactions_cum = std::stoll(cells[6]);
    r.raw_return = std::stod(cells[7]);
    r.scaled_return = std::stod(cells[8]);
    r.stderr_return = std::stod(cells[9]);
    r.wall_ms = std::stoll(cells[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace bco
