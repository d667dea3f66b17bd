#pragma once

// Internal helpers shared by the library sources. Not installed.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

namespace qel::detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

// Splits on '\n'; a trailing newline does not produce an empty last line.
// '\r' before the newline is stripped.
inline std::vector<std::string> split_lines(std::string_view data) {
  std::vector<std::string> lines;
  std::size_t i = 0;
  while (i < data.size()) {
    std::size_t j = data.find('\n', i);
    if (j == std::string_view::npos) j = data.size();
    std::size_t end = j;
    if (end > i && data[end - 1] == '\r') --end;
    lines.emplace_back(data.substr(i, end - i));
    i = j + 1;
  }
  return lines;
}

inline std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    std::size_t j = line.find(sep, i);
    if (j == std::string_view::npos) {
      out.emplace_back(line.substr(i));
      break;
    }
    out.emplace_back(line.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// Locale-independent double formatting with 17 significant digits; this
// round-trips every finite double exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// Whole-string numeric parsing; throws std::invalid_argument on leftovers.
inline double parse_double(std::string_view s) {
  double out;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: " + std::string(s));
  return out;
}

inline std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t out;
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("not a count: " + std::string(s));
  return out;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written into pre-sized slots so the outcome is independent of scheduling.
inline void parallel_for(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = std::min(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mu;
  std::atomic<std::size_t> next{0};
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qel::detail
