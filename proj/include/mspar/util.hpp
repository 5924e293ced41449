#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "mspar/common.hpp"

namespace mspar {

class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_)
        .count();
  }
  void restart() { start_ = clock::now(); }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

// Runs fn(0..count-1) on up to `threads` workers. Tasks pull indices from a
// shared counter; each writes only to its own slot, so results do not depend
// on the schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Shortest decimal form that parses back to the identical double (%.17g).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mspar
