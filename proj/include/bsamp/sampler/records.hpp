// Copyright 2026 The bsamp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "bsamp/error.hpp"
#include "bsamp/sampler/config.hpp"
#include "bsamp/states/fock.hpp"

namespace bsamp {

struct SampleRecord {
  Regime regime = Regime::GBS;
  std::int64_t time_bin = 0;
  PhotonPattern herald;
  PhotonPattern signal;

  bool operator==(const SampleRecord&) const = default;
};

inline std::string to_json_line(const SampleRecord& r) {
  std::string s;
  s.reserve(64);
  s += "{\"time_bin\":";
  s += std::to_string(r.time_bin);
  s += ",\"regime\":\"";
  s += regime_name(r.regime);
  s += "\",\"herald\":[";
  for (int i = 0; i < r.herald.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(r.herald[i]);
  }
  s += "],\"signal\":[";
  for (int i = 0; i < r.signal.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(r.signal[i]);
  }
  s += "]}";
  return s;
}

inline SampleRecord parse_record(const std::string& line, std::int64_t line_no) {
  auto fail = [&](const std::string& why) {
    return ConfigError("sample line " + std::to_string(line_no) + ": " + why);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw fail("malformed JSON");
  }
  if (!j.is_object()) throw fail("record must be an object");
  for (const char* key : {"time_bin", "regime", "herald", "signal"}) {
    if (!j.contains(key)) throw fail(std::string("missing field '") + key + "'");
  }
  SampleRecord r;
  if (!j["time_bin"].is_number_integer()) throw fail("time_bin must be an integer");
  r.time_bin = j["time_bin"].get<std::int64_t>();
  if (!j["regime"].is_string()) throw fail("regime must be a string");
  try {
    r.regime = parse_regime(j["regime"].get<std::string>());
  } catch (const ConfigError& e) {
    throw fail(e.what());
  }
  auto counts = [&](const nlohmann::json& a, const char* name) {
    if (!a.is_array()) throw fail(std::string(name) + " must be an array");
    PhotonPattern p;
    for (const auto& v : a) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw fail(std::string(name) + " entries must be non-negative integers");
      p.counts.push_back(v.get<int>());
    }
    return p;
  };
  r.herald = counts(j["herald"], "herald");
  r.signal = counts(j["signal"], "signal");
  if (r.herald.size() != r.signal.size()) throw fail("herald and signal lengths differ");
  if (r.signal.size() == 0) throw fail("empty patterns");
  return r;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Line sink; gzip-compressed when the path ends in ".gz".
class LineWriter {
 public:
  explicit LineWriter(const std::string& path) : path_(path) {
    if (ends_with(path, ".gz")) {
      // zlib writes a fixed header (no name, zero mtime), so output is byte-stable.
      gz_ = gzopen(path.c_str(), "wb6");
      if (gz_ == nullptr) throw ConfigError("cannot write " + path);
    } else {
      out_.open(path, std::ios::binary);
      if (!out_) throw ConfigError("cannot write " + path);
    }
  }
  ~LineWriter() { close(); }
  LineWriter(const LineWriter&) = delete;
  LineWriter& operator=(const LineWriter&) = delete;

  void write_line(const std::string& s) {
    if (gz_) {
      gzwrite(gz_, s.data(), static_cast<unsigned>(s.size()));
      gzputc(gz_, '\n');
    } else {
      out_ << s << '\n';
    }
  }

  void close() {
    if (gz_) {
      gzclose(gz_);
      gz_ = nullptr;
    }
    if (out_.is_open()) out_.close();
  }

 private:
  std::string path_;
  gzFile gz_ = nullptr;
  std::ofstream out_;
};

// Reads plain or gzip files transparently.
class LineReader {
 public:
  explicit LineReader(const std::string& path) {
    gz_ = gzopen(path.c_str(), "rb");
    if (gz_ == nullptr) throw ConfigError("cannot open " + path);
    gzbuffer(gz_, 1 << 16);
  }
  ~LineReader() {
    if (gz_) gzclose(gz_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line) {
    line.clear();
    char buf[4096];
    while (true) {
      if (gzgets(gz_, buf, sizeof buf) == nullptr) return !line.empty();
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  gzFile gz_ = nullptr;
};

// Calls fn(record) for every non-blank line; malformed lines raise ConfigError with the line number.
template <class Fn>
std::int64_t for_each_record(const std::string& path, Fn&& fn) {
  LineReader reader(path);
  std::string line;
  std::int64_t line_no = 0;
  std::int64_t count = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(parse_record(line, line_no));
    ++count;
  }
  return count;
}

inline std::vector<SampleRecord> read_records(const std::string& path) {
  std::vector<SampleRecord> out;
  for_each_record(path, [&](SampleRecord r) { out.push_back(std::move(r)); });
  return out;
}

inline void write_records(const std::string& path, const std::vector<SampleRecord>& records) {
  LineWriter w(path);
  for (const auto& r : records) w.write_line(to_json_line(r));
}

}  // namespace bsamp
