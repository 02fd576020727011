// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scmap {

inline constexpr int kMaxTableInputs = 16;

/// Complete function table of a multi-output boolean function.
///
/// Row `r` holds the output word for the input assignment whose bit `i` is
/// input `i` (input 0 is the least significant index bit). Bit `j` of a row
/// is output `j`.
class TruthTable {
 public:
  TruthTable() = default;
  TruthTable(int num_inputs, int num_outputs);
  TruthTable(int num_inputs, int num_outputs, std::vector<std::uint32_t> rows);

  int num_inputs() const noexcept { return num_inputs_; }
  int num_outputs() const noexcept { return num_outputs_; }
  std::size_t num_rows() const noexcept { return rows_.size(); }

  std::uint32_t row(std::size_t r) const { return rows_[r]; }
  void set_row(std::size_t r, std::uint32_t value);
  std::span<const std::uint32_t> rows() const noexcept { return rows_; }

  bool bit(std::size_t r, int output) const {
    return (rows_[r] >> output) & 1u;
  }

  /// Bit-parallel view of one output: bit r of the returned words is row r.
  std::vector<std::uint64_t> output_bits(int output) const;
  static TruthTable from_output_bits(
      int num_inputs, std::span<const std::vector<std::uint64_t>> outputs);

  /// Restrict to a single output column.
  TruthTable project(int output) const;

  /// Table of f(x_perm) where input i of the result feeds input perm[i] of
  /// this table.
  TruthTable permute_inputs(std::span<const int> perm) const;

  bool operator==(const TruthTable& other) const = default;

  std::string to_string() const;

 private:
  int num_inputs_ = 0;
  int num_outputs_ = 0;
  std::vector<std::uint32_t> rows_;
};

/// Number of 64-bit words needed for a bit-parallel column over 2^n rows.
inline std::size_t words_for_inputs(int num_inputs) {
  return num_inputs <= 6 ? 1 : (std::size_t{1} << (num_inputs - 6));
}

/// Mask of the valid row bits in the last word of a column.
inline std::uint64_t row_mask(int num_inputs) {
  return num_inputs >= 6 ? ~std::uint64_t{0}
                         : ((std::uint64_t{1} << (1u << num_inputs)) - 1);
}

/// Projection column of input `i` over 2^n rows.
std::vector<std::uint64_t> input_column(int num_inputs, int i);

}  // namespace scmap
