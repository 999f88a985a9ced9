#pragma once

// Helpers shared by the workbench subcommands. The tool talks to the library
// through the C interface only; file formats for flat artifacts (labels,
// predictions, follow-up) are parsed here.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pedrisk/pedrisk.h"

namespace cli {

struct Fatal : std::runtime_error {
  int code;
  Fatal(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// Exit codes: 0 ok, 1 io/unexpected, 2 bad input, 3 numeric failure.
inline int exit_code(pr_status s) {
  switch (s) {
    case PR_OK: return 0;
    case PR_ERR_VALIDATION:
    case PR_ERR_INVALID_ARG: return 2;
    case PR_ERR_NUMERIC: return 3;
    case PR_ERR_IO:
    default: return 1;
  }
}

inline void check(pr_status s, const std::string& what) {
  if (s != PR_OK)
    throw Fatal(exit_code(s), what + ": " + pr_last_error());
}

// Owned string coming back from the library.
inline std::string take_string(char* s) {
  std::string out = s ? s : "";
  pr_string_free(s);
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Fatal(1, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Comma-separated values, no quoting, '#' lines skipped.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Fatal(1, "cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Fatal(1, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Fatal(1, "write failed: " + path);
}

// FNV-1a over the canonical option string; stamped into artifact metadata so
// outputs can be traced back to their settings.
inline std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

// RAII wrappers so early exits cannot leak handles.
template <typename T, void (*FreeFn)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      reset();
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  void reset() {
    if (ptr) FreeFn(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  T* get() const { return ptr; }
  explicit operator bool() const { return ptr != nullptr; }
};

using CohortHandle = Handle<pr_cohort, pr_cohort_free>;
using PenetranceHandle = Handle<pr_penetrance, pr_penetrance_free>;
using ReferenceHandle = Handle<pr_reference, pr_reference_free>;
using ModelHandle = Handle<pr_model, pr_model_free>;

// Preset name first, file path otherwise.
inline ReferenceHandle open_reference(const std::string& spec) {
  ReferenceHandle ref;
  if (pr_reference_preset(spec.c_str(), ref.out()) == PR_OK) return ref;
  check(pr_reference_load(spec.c_str(), ref.out()), "reference " + spec);
  return ref;
}

inline PenetranceHandle open_penetrance(const std::string& path_or_empty) {
  PenetranceHandle pen;
  if (path_or_empty.empty())
    check(pr_penetrance_create_default(pen.out()), "penetrance");
  else
    check(pr_penetrance_load(path_or_empty.c_str(), pen.out()),
          "penetrance " + path_or_empty);
  return pen;
}

}  // namespace cli
