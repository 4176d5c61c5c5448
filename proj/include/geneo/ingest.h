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

#ifndef GENEO_INGEST_H_
#define GENEO_INGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geneo/grid.h"

namespace geneo {

// Big-endian IDX magics for unsigned-byte payloads.
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
// 3-D float64 payload, used to store real-valued signals.
inline constexpr std::uint32_t kIdxSignalMagic = 0x00000E03;

struct IdxImageSet {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

  std::uint8_t at(std::size_t image, std::size_t row, std::size_t col) const {
    return pixels[(image * rows + row) * cols + col];
  }
};

struct IdxLabelSet {
  std::vector<std::uint8_t> labels;
};

// Inflates gzip input (0x1F 0x8B prefix); other input is returned as is.
// Throws IoError on a corrupt stream.
std::vector<std::uint8_t> MaybeGunzip(std::span<const std::uint8_t> bytes);

// Parse a 3-D unsigned-byte IDX file, gzipped or raw. Throws IoError on a
// wrong magic, truncated or oversized payload, or dimension overflow.
IdxImageSet ParseIdx(std::span<const std::uint8_t> bytes);
IdxLabelSet ParseIdxLabels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> SerializeIdx(const IdxImageSet& images);
std::vector<std::uint8_t> SerializeIdxLabels(const IdxLabelSet& labels);

// Signals as a float64 IDX container, count x n x n.
std::vector<std::uint8_t> SerializeSignalsIdx(const std::vector<Signal>& signals);
// Accepts float64 containers as written above and unsigned-byte image files
// (scaled by 1/255).
std::vector<Signal> ParseSignalsIdx(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);

// Which sample represents each letter.
struct LetterPolicy {
  enum class Kind { kFirst, kIndices, kSeeded };
  Kind kind = Kind::kFirst;
  // kIndices: one image index per letter, a..z.
  std::vector<std::size_t> indices;
  // kSeeded: uniform pick among each class's samples.
  std::uint64_t seed = 0;
};

std::string Describe(const LetterPolicy& policy);

struct LetterOptions {
  int n = 28;
  // Label value of 'a'. EMNIST letters use 1..26.
  int label_base = 1;
  // EMNIST stores glyphs transposed; undo it so they display upright.
  bool transpose = true;
};

// One signal per letter a..z, pixels scaled to [0, 1]. Throws
// std::invalid_argument naming the absent letters when a class is missing,
// or when the images are not n x n or counts disagree.
std::vector<Signal> LoadLetters(const IdxImageSet& images,
                                const IdxLabelSet& labels,
                                const LetterPolicy& policy = {},
                                const LetterOptions& options = {});

// Letter weights a..z, normalized to sum to 1.
struct FrequencyTable {
  std::vector<std::pair<char, double>> entries;
  double input_sum = 1.0;
  // Set when the input sum was off from 1 by more than kWeightTolerance.
  std::string notice;

  double weight(char letter) const;
  std::vector<double> Weights() const;
};

// "letter=value" lines ('#' comments allowed) or a JSON object mapping
// letters to values. Throws std::invalid_argument on unknown labels,
// negative weights or missing letters.
FrequencyTable ParseFrequencies(const std::string& text);
FrequencyTable LoadFrequencies(const std::string& path);
FrequencyTable UniformFrequencies();

// Deterministic stand-in glyphs: 26 distinct n x n images of blurred strokes
// with values in [0, 1]. Throws std::invalid_argument for n < 8.
std::vector<Signal> SynthGlyphs(int n, std::uint64_t seed);

// n x n signals with independent uniform [0, 1) entries.
std::vector<Signal> RandomSignals(int n, int count, std::uint64_t seed);

// Manifest JSON {"n": int, "signals": [paths], "weights": [reals]}. Relative
// paths resolve against the manifest's directory. ".csv" files are read as
// CSV, anything else as an IDX signal container (first image).
WeightedSignalSpace LoadManifest(const std::string& path);

}  // namespace geneo

#endif  // GENEO_INGEST_H_
