// Copyright 2026 The vflattack Authors
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

#ifndef VFL_PARTITION_PARTITION_H_
#define VFL_PARTITION_PARTITION_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vfl/linalg/matrix.h"
#include "vfl/linalg/rng.h"

namespace vfl {

enum class Owner { kAdversary, kTarget };

// Two-sided vertical split of a shared feature ordering. Every other party
// is folded into either the adversary (active party plus colluders) or the
// target.
class VerticalPartition {
 public:
  // Adversary gets every feature not listed in `target_indices`.
  // Throws InputError on duplicates or out-of-range indices.
  static VerticalPartition FromTargetIndices(std::size_t total_features,
                                             std::vector<std::size_t> target_indices);
  static VerticalPartition FromAdversaryIndices(std::size_t total_features,
                                                std::vector<std::size_t> adv_indices);

  std::size_t total_features() const { return owner_.size(); }
  std::size_t num_adv() const { return adv_.size(); }
  std::size_t num_target() const { return target_.size(); }
  const std::vector<std::size_t>& adv_indices() const { return adv_; }
  const std::vector<std::size_t>& target_indices() const { return target_; }

  Owner owner(std::size_t feature) const { return owner_.at(feature); }
  bool is_target(std::size_t feature) const { return owner(feature) == Owner::kTarget; }

  // (x_adv, x_target), order preserving.
  std::pair<Vector, Vector> split(std::span<const double> x) const;
  Vector assemble(std::span<const double> x_adv, std::span<const double> x_target) const;

  // Row-wise versions over a sample matrix.
  std::pair<Matrix, Matrix> split_rows(const Matrix& x) const;
  Matrix assemble_rows(const Matrix& x_adv, const Matrix& x_target) const;

  friend bool operator==(const VerticalPartition&, const VerticalPartition&) = default;

 private:
  VerticalPartition() = default;
  std::vector<Owner> owner_;
  std::vector<std::size_t> adv_;
  std::vector<std::size_t> target_;
};

// d_target = round-half-up(frac_target * d) features chosen uniformly at
// random. Throws InputError if that count is 0 or d.
VerticalPartition sample_partition(std::size_t d, double frac_target, Rng& rng);

}  // namespace vfl

#endif  // VFL_PARTITION_PARTITION_H_
