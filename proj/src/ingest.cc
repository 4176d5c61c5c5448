// Copyright 2026 The geneo-select Authors
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

#include "geneo/ingest.h"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "geneo/errors.h"
#include "geneo/rng.h"
#include "json.hpp"

namespace geneo {
namespace {

constexpr std::uint8_t kUbyte = 0x08;
constexpr std::uint8_t kFloat64 = 0x0E;

std::string Hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08X", v);
  return buf;
}

std::uint32_t ReadBe32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

void AppendBe32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

struct IdxArray {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::size_t payload_offset = 0;
  std::size_t element_count = 0;
};

// Validates the header and the exact payload length for `magic`.
IdxArray ParseHeader(std::span<const std::uint8_t> bytes,
                     std::initializer_list<std::uint32_t> accepted) {
  if (bytes.size() < 4) {
    throw IoError("IDX data too short for a header: " +
                  std::to_string(bytes.size()) + " bytes");
  }
  IdxArray array;
  array.magic = ReadBe32(bytes, 0);
  if (std::find(accepted.begin(), accepted.end(), array.magic) ==
      accepted.end()) {
    throw IoError("bad IDX magic: expected " + Hex(*accepted.begin()) +
                  ", got " + Hex(array.magic));
  }
  const std::size_t rank = array.magic & 0xFF;
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header) {
    throw IoError("truncated IDX header: need " + std::to_string(header) +
                  " bytes, have " + std::to_string(bytes.size()));
  }
  const std::size_t element_size = ((array.magic >> 8) & 0xFF) == kFloat64 ? 8 : 1;
  std::size_t count = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    const std::uint32_t dim = ReadBe32(bytes, 4 + 4 * d);
    array.dims.push_back(dim);
    if (dim != 0 && count > std::numeric_limits<std::size_t>::max() / 8 / dim) {
      throw IoError("IDX dimensions overflow");
    }
    count *= dim;
  }
  const std::size_t needed = header + count * element_size;
  if (bytes.size() < needed) {
    throw IoError("truncated IDX payload: need " + std::to_string(needed) +
                  " bytes, have " + std::to_string(bytes.size()));
  }
  if (bytes.size() > needed) {
    throw IoError("IDX payload longer than declared: expected " +
                  std::to_string(needed) + " bytes, have " +
                  std::to_string(bytes.size()));
  }
  array.payload_offset = header;
  array.element_count = count;
  return array;
}

}  // namespace

std::vector<std::uint8_t> MaybeGunzip(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1F || bytes[1] != 0x8B) {
    return {bytes.begin(), bytes.end()};
  }
  z_stream stream{};
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) {
    throw IoError("zlib initialisation failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  stream.next_in = const_cast<Bytef*>(bytes.data());
  stream.avail_in = static_cast<uInt>(bytes.size());
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk;
    stream.avail_out = sizeof(chunk);
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      inflateEnd(&stream);
      throw IoError("corrupt gzip stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw IoError("truncated gzip stream");
    }
  }
  inflateEnd(&stream);
  return out;
}

IdxImageSet ParseIdx(std::span<const std::uint8_t> raw) {
  const std::vector<std::uint8_t> bytes = MaybeGunzip(raw);
  const IdxArray array = ParseHeader(bytes, {kIdxImageMagic});
  IdxImageSet set;
  set.count = array.dims[0];
  set.rows = array.dims[1];
  set.cols = array.dims[2];
  set.pixels.assign(bytes.begin() + array.payload_offset, bytes.end());
  return set;
}

IdxLabelSet ParseIdxLabels(std::span<const std::uint8_t> raw) {
  const std::vector<std::uint8_t> bytes = MaybeGunzip(raw);
  const IdxArray array = ParseHeader(bytes, {kIdxLabelMagic});
  return {{bytes.begin() + array.payload_offset, bytes.end()}};
}

std::vector<std::uint8_t> SerializeIdx(const IdxImageSet& images) {
  const std::size_t expected =
      std::size_t{images.count} * images.rows * images.cols;
  if (images.pixels.size() != expected) {
    throw std::invalid_argument("image set payload does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + expected);
  AppendBe32(out, kIdxImageMagic);
  AppendBe32(out, images.count);
  AppendBe32(out, images.rows);
  AppendBe32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> SerializeIdxLabels(const IdxLabelSet& labels) {
  std::vector<std::uint8_t> out;
  AppendBe32(out, kIdxLabelMagic);
  AppendBe32(out, static_cast<std::uint32_t>(labels.labels.size()));
  out.insert(out.end(), labels.labels.begin(), labels.labels.end());
  return out;
}

std::vector<std::uint8_t> SerializeSignalsIdx(const std::vector<Signal>& signals) {
  if (signals.empty()) throw std::invalid_argument("no signals to serialize");
  const int n = signals.front().grid().n();
  std::vector<std::uint8_t> out;
  AppendBe32(out, kIdxSignalMagic);
  AppendBe32(out, static_cast<std::uint32_t>(signals.size()));
  AppendBe32(out, n);
  AppendBe32(out, n);
  for (const Signal& s : signals) {
    RequireSameGrid(signals.front().grid(), s.grid(), "signal container");
    for (double v : s.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(bits >> shift));
      }
    }
  }
  return out;
}

std::vector<Signal> ParseSignalsIdx(std::span<const std::uint8_t> raw) {
  const std::vector<std::uint8_t> bytes = MaybeGunzip(raw);
  const IdxArray array = ParseHeader(bytes, {kIdxSignalMagic, kIdxImageMagic});
  const std::uint32_t count = array.dims[0];
  if (array.dims[1] != array.dims[2]) {
    throw IoError("signal images must be square");
  }
  const TorusGrid grid(static_cast<int>(array.dims[1]));
  const std::size_t per = grid.site_count();
  std::vector<Signal> out;
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<double> values(per);
    for (std::size_t p = 0; p < per; ++p) {
      const std::size_t element = c * per + p;
      if (array.magic == kIdxImageMagic) {
        values[p] = bytes[array.payload_offset + element] / 255.0;
      } else {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
          bits = (bits << 8) | bytes[array.payload_offset + element * 8 + b];
        }
        values[p] = std::bit_cast<double>(bits);
      }
    }
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::string& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::string Describe(const LetterPolicy& policy) {
  switch (policy.kind) {
    case LetterPolicy::Kind::kFirst:
      return "first";
    case LetterPolicy::Kind::kIndices: {
      std::string out = "indices:";
      for (std::size_t i = 0; i < policy.indices.size(); ++i) {
        out += (i ? "," : "") + std::to_string(policy.indices[i]);
      }
      return out;
    }
    case LetterPolicy::Kind::kSeeded:
      return "seeded:" + std::to_string(policy.seed);
  }
  return "unknown";
}

std::vector<Signal> LoadLetters(const IdxImageSet& images,
                                const IdxLabelSet& labels,
                                const LetterPolicy& policy,
                                const LetterOptions& options) {
  if (labels.labels.size() != images.count) {
    throw std::invalid_argument(
        "label count " + std::to_string(labels.labels.size()) +
        " differs from image count " + std::to_string(images.count));
  }
  if (images.rows != static_cast<std::uint32_t>(options.n) ||
      images.cols != static_cast<std::uint32_t>(options.n)) {
    throw std::invalid_argument(
        "images are " + std::to_string(images.rows) + "x" +
        std::to_string(images.cols) + ", configured grid is n=" +
        std::to_string(options.n));
  }
  std::vector<std::vector<std::size_t>> by_class(26);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const int letter = static_cast<int>(labels.labels[i]) - options.label_base;
    if (letter >= 0 && letter < 26) by_class[letter].push_back(i);
  }
  std::string missing;
  for (int c = 0; c < 26; ++c) {
    if (by_class[c].empty()) missing += static_cast<char>('a' + c);
  }
  if (!missing.empty()) {
    throw std::invalid_argument("letters without samples: " + missing);
  }
  std::vector<std::size_t> picks(26);
  Rng rng(policy.seed);
  for (int c = 0; c < 26; ++c) {
    switch (policy.kind) {
      case LetterPolicy::Kind::kFirst:
        picks[c] = by_class[c].front();
        break;
      case LetterPolicy::Kind::kIndices:
        if (policy.indices.size() != 26) {
          throw std::invalid_argument("index policy needs 26 indices");
        }
        picks[c] = policy.indices[c];
        if (picks[c] >= images.count ||
            static_cast<int>(labels.labels[picks[c]]) - options.label_base != c) {
          throw std::invalid_argument("index " + std::to_string(picks[c]) +
                                      " is not a sample of letter " +
                                      std::string(1, static_cast<char>('a' + c)));
        }
        break;
      case LetterPolicy::Kind::kSeeded:
        picks[c] = by_class[c][rng.Below(by_class[c].size())];
        break;
    }
  }
  const TorusGrid grid(options.n);
  std::vector<Signal> out;
  out.reserve(26);
  for (std::size_t pick : picks) {
    std::vector<double> values(grid.site_count());
    for (int i = 0; i < options.n; ++i) {
      for (int j = 0; j < options.n; ++j) {
        const std::uint8_t v =
            options.transpose ? images.at(pick, j, i) : images.at(pick, i, j);
        values[grid.Index(i, j)] = v / 255.0;
      }
    }
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

double FrequencyTable::weight(char letter) const {
  for (const auto& [label, w] : entries) {
    if (label == letter) return w;
  }
  throw std::invalid_argument(std::string("no weight for letter ") + letter);
}

std::vector<double> FrequencyTable::Weights() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& entry : entries) out.push_back(entry.second);
  return out;
}

namespace {

FrequencyTable Normalize(std::vector<double> raw) {
  std::string missing;
  double sum = 0.0;
  for (int c = 0; c < 26; ++c) {
    if (std::isnan(raw[c])) {
      missing += static_cast<char>('a' + c);
      continue;
    }
    sum += raw[c];
  }
  if (!missing.empty()) {
    throw std::invalid_argument("frequency table lacks letters: " + missing);
  }
  if (!(sum > 0.0)) throw std::invalid_argument("frequencies sum to zero");
  FrequencyTable table;
  table.input_sum = sum;
  for (int c = 0; c < 26; ++c) {
    table.entries.emplace_back(static_cast<char>('a' + c), raw[c] / sum);
  }
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "letter frequencies summed to %.12g; renormalized to 1", sum);
    table.notice = buf;
  }
  return table;
}

void Assign(std::vector<double>& raw, const std::string& label, double value) {
  if (label.size() != 1 || !std::isalpha(static_cast<unsigned char>(label[0]))) {
    throw std::invalid_argument("unknown frequency label '" + label + "'");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("negative or invalid weight for '" + label + "'");
  }
  const int c = std::tolower(static_cast<unsigned char>(label[0])) - 'a';
  if (!std::isnan(raw[c])) {
    throw std::invalid_argument("duplicate frequency label '" + label + "'");
  }
  raw[c] = value;
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

FrequencyTable ParseFrequencies(const std::string& text) {
  std::vector<double> raw(26, std::numeric_limits<double>::quiet_NaN());
  const std::string trimmed = Trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    const auto j = nlohmann::json::parse(trimmed);
    for (const auto& [label, value] : j.items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("non-numeric weight for '" + label + "'");
      }
      Assign(raw, label, value.get<double>());
    }
    return Normalize(std::move(raw));
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("expected letter=value, got '" + line + "'");
    }
    const std::string value_text = Trim(line.substr(eq + 1));
    double value;
    std::size_t used = 0;
    try {
      value = std::stod(value_text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad weight '" + value_text + "'");
    }
    if (used != value_text.size()) {
      throw std::invalid_argument("bad weight '" + value_text + "'");
    }
    Assign(raw, Trim(line.substr(0, eq)), value);
  }
  return Normalize(std::move(raw));
}

FrequencyTable LoadFrequencies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseFrequencies(buffer.str());
}

FrequencyTable UniformFrequencies() {
  return Normalize(std::vector<double>(26, 1.0));
}

std::vector<Signal> SynthGlyphs(int n, std::uint64_t seed) {
  if (n < 8) {
    throw std::invalid_argument("synthetic glyphs need n >= 8, got " +
                                std::to_string(n));
  }
  const TorusGrid grid(n);
  std::vector<Signal> out;
  out.reserve(26);
  for (int letter = 0; letter < 26; ++letter) {
    Rng rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(letter));
    const double lo = 0.18 * n;
    const double hi = 0.82 * (n - 1);
    const double width = 0.045 * n + rng.Uniform(0.0, 0.02 * n);
    struct Stroke {
      double x0, y0, x1, y1;
    };
    std::vector<Stroke> strokes;
    const int stroke_count = 2 + static_cast<int>(rng.Below(3));
    for (int k = 0; k < stroke_count; ++k) {
      strokes.push_back({rng.Uniform(lo, hi), rng.Uniform(lo, hi),
                         rng.Uniform(lo, hi), rng.Uniform(lo, hi)});
    }
    // Some glyphs get a bowl, like o, b, d, p.
    const bool bowl = rng.Below(3) == 0;
    const double cx = rng.Uniform(0.35 * n, 0.65 * n);
    const double cy = rng.Uniform(0.35 * n, 0.65 * n);
    const double radius = rng.Uniform(0.12 * n, 0.25 * n);
    std::vector<double> values(grid.site_count(), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (const Stroke& s : strokes) {
          const double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
          const double len2 = vx * vx + vy * vy;
          double t = len2 > 0.0 ? ((i - s.x0) * vx + (j - s.y0) * vy) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          const double dx = i - (s.x0 + t * vx), dy = j - (s.y0 + t * vy);
          best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
        if (bowl) {
          const double ring = std::abs(std::hypot(i - cx, j - cy) - radius);
          best = std::min(best, ring);
        }
        values[grid.Index(i, j)] =
            std::exp(-(best * best) / (2.0 * width * width));
      }
    }
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

std::vector<Signal> RandomSignals(int n, int count, std::uint64_t seed) {
  const TorusGrid grid(n);
  Rng rng(seed);
  std::vector<Signal> out;
  for (int c = 0; c < count; ++c) {
    std::vector<double> values(grid.site_count());
    for (double& v : values) v = rng.Uniform();
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

WeightedSignalSpace LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest " + path + " is not valid JSON: " + e.what());
  }
  const int n = j.at("n").get<int>();
  const auto paths = j.at("signals").get<std::vector<std::string>>();
  const auto weights = j.at("weights").get<std::vector<double>>();
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<Signal> signals;
  for (const std::string& p : paths) {
    std::filesystem::path full(p);
    if (full.is_relative()) full = base / full;
    Signal s = full.extension() == ".csv"
                   ? ReadSignalCsv(full.string())
                   : ParseSignalsIdx(ReadFileBytes(full.string())).at(0);
    if (s.grid().n() != n) {
      throw std::invalid_argument("signal " + p + " has n=" +
                                  std::to_string(s.grid().n()) +
                                  ", manifest says n=" + std::to_string(n));
    }
    signals.push_back(std::move(s));
  }
  return MakeSpace(std::move(signals), weights);
}

}  // namespace geneo
