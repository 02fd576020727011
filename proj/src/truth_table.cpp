// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/truth_table.hpp"

#include <sstream>

#include "scmap/error.hpp"

namespace scmap {

namespace {

void check_shape(int num_inputs, int num_outputs) {
  if (num_inputs < 0 || num_inputs > kMaxTableInputs) {
    throw Error(ErrorKind::kValidation,
                "truth table input count out of range: " +
                    std::to_string(num_inputs));
  }
  if (num_outputs < 0 || num_outputs > 32) {
    throw Error(ErrorKind::kValidation,
                "truth table output count out of range: " +
                    std::to_string(num_outputs));
  }
}

std::uint32_t output_mask(int num_outputs) {
  return num_outputs >= 32 ? ~0u : ((1u << num_outputs) - 1u);
}

}  // namespace

TruthTable::TruthTable(int num_inputs, int num_outputs)
    : num_inputs_(num_inputs), num_outputs_(num_outputs) {
  check_shape(num_inputs, num_outputs);
  rows_.assign(std::size_t{1} << num_inputs, 0u);
}

TruthTable::TruthTable(int num_inputs, int num_outputs,
                       std::vector<std::uint32_t> rows)
    : num_inputs_(num_inputs), num_outputs_(num_outputs), rows_(std::move(rows)) {
  check_shape(num_inputs, num_outputs);
  if (rows_.size() != (std::size_t{1} << num_inputs)) {
    throw Error(ErrorKind::kValidation,
                "truth table needs " +
                    std::to_string(std::size_t{1} << num_inputs) +
                    " rows, got " + std::to_string(rows_.size()));
  }
  const auto mask = output_mask(num_outputs);
  for (auto r : rows_) {
    if ((r & ~mask) != 0) {
      throw Error(ErrorKind::kValidation,
                  "truth table row uses more than " +
                      std::to_string(num_outputs) + " output bits");
    }
  }
}

void TruthTable::set_row(std::size_t r, std::uint32_t value) {
  rows_[r] = value & output_mask(num_outputs_);
}

std::vector<std::uint64_t> TruthTable::output_bits(int output) const {
  std::vector<std::uint64_t> words(words_for_inputs(num_inputs_), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if ((rows_[r] >> output) & 1u) words[r >> 6] |= std::uint64_t{1} << (r & 63);
  }
  return words;
}

TruthTable TruthTable::from_output_bits(
    int num_inputs, std::span<const std::vector<std::uint64_t>> outputs) {
  TruthTable t(num_inputs, static_cast<int>(outputs.size()));
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const auto& col = outputs[j];
    for (std::size_t r = 0; r < t.rows_.size(); ++r) {
      if ((col[r >> 6] >> (r & 63)) & 1u) t.rows_[r] |= 1u << j;
    }
  }
  return t;
}

TruthTable TruthTable::project(int output) const {
  TruthTable t(num_inputs_, 1);
  for (std::size_t r = 0; r < rows_.size(); ++r) t.rows_[r] = (rows_[r] >> output) & 1u;
  return t;
}

TruthTable TruthTable::permute_inputs(std::span<const int> perm) const {
  TruthTable t(num_inputs_, num_outputs_);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    std::size_t src = 0;
    for (int i = 0; i < num_inputs_; ++i) {
      if ((r >> i) & 1u) src |= std::size_t{1} << perm[i];
    }
    t.rows_[r] = rows_[src];
  }
  return t;
}

std::string TruthTable::to_string() const {
  std::ostringstream os;
  os << num_inputs_ << "->" << num_outputs_ << ":[";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (r) os << ',';
    os << rows_[r];
  }
  os << ']';
  return os.str();
}

std::vector<std::uint64_t> input_column(int num_inputs, int i) {
  std::vector<std::uint64_t> words(words_for_inputs(num_inputs), 0);
  if (i < 6) {
    static constexpr std::uint64_t kPattern[6] = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    for (auto& w : words) w = kPattern[i] & row_mask(num_inputs);
  } else {
    for (std::size_t w = 0; w < words.size(); ++w) {
      if ((w >> (i - 6)) & 1u) words[w] = ~std::uint64_t{0};
    }
  }
  return words;
}

}  // namespace scmap
