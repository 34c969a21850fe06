#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "afplab/folner.hpp"

namespace afplab {

using json = nlohmann::ordered_json;

inline json rational_json(const Rational& r) {
  return json{{"num", r.numerator()}, {"den", r.denominator()}};
}

inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? "."
                                          : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open " + path.string() + " for writing");
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// CSV for a ratio profile: one row per (index, generator).
inline std::string ratio_profile_csv(const std::vector<RatioRow>& rows) {
  std::string out = "index,set_size,generator_label,ratio_num,ratio_den,"
                    "ratio_float\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index) + "," + std::to_string(r.set_size) + "," +
           r.generator + "," + std::to_string(r.ratio.numerator()) + "," +
           std::to_string(r.ratio.denominator()) + "," +
           format_float(boost::rational_cast<double>(r.ratio)) + "\n";
  }
  return out;
}

}  // namespace afplab
