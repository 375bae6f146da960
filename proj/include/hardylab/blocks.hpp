#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hardylab {

enum class BlockCase { case_one, case_two };

/// Block decomposition of [1, N] driving the damping sequence r.
///
/// case_one: boundaries are n-values (boundaries[0] = 0); block k covers
/// (boundaries[k], boundaries[k+1]] and the ratio series exceeds k on it.
/// R_k = 1 / ((k+1)^2 * W_k) with W_k the block weight, so the weighted block
/// sum of r telescopes to sum 1/(k+1)^2.
///
/// case_two: boundaries are n-values of greedy unit-mass chunks (weight of
/// each chunk >= 1); `derived` holds the case-one partition of the per-chunk
/// ratio minima weighted by the chunk masses, and `super_boundaries` /
/// `super_r` map that partition back to n-space.
struct BlockPartition {
  BlockCase kind = BlockCase::case_one;
  std::vector<std::uint64_t> boundaries;  // size K+1, boundaries[0] = 0
  std::vector<double> block_weight;       // W_k, size K
  std::vector<double> block_inf_c;        // min of c over block k, size K
  std::vector<double> r_block;            // R assigned to block k, size K
  bool short_partition = false;           // fewer than two complete blocks
  std::shared_ptr<const BlockPartition> derived;  // case_two only
  std::vector<std::uint64_t> super_boundaries;    // case_two: n-space, [0]=0
  std::vector<double> super_r;                    // case_two: R per superblock

  /// Boundaries and per-block r in n-space: the partition's own blocks for
  /// case_one, the superblocks for case_two.
  std::span<const std::uint64_t> r_boundaries() const;
  std::span<const double> r_values() const;
};

/// Builds the threshold partition of [1, N]: boundary t is the smallest index
/// n such that c_m > t for every scanned m >= n, inflated so gaps never
/// shrink and so block weights keep R_k nonincreasing. Weights default to 1.
/// Fails when c never exceeds 1 on the scanned range.
BlockPartition build_blocks_case1(std::span<const double> c,
                                  std::span<const double> weights,
                                  std::uint64_t N);

/// Greedy unit-mass chunking of a followed by a case-one partition of the
/// chunk ratio minima. Fails when not even one chunk reaches weight 1.
BlockPartition build_blocks_case2(std::span<const double> a,
                                  std::span<const double> c, std::uint64_t N);

/// Damping sequence induced by a partition: r_n equals the block's R on each
/// block and the last R past the final boundary.
struct RSequence {
  std::vector<double> values;
  bool strictified = false;
};

RSequence emit_r(std::span<const std::uint64_t> boundaries,
                 std::span<const double> r_block, std::uint64_t N);

/// values[n-1] *= (1 + 1/n): turns a nonincreasing r into a strictly
/// decreasing one while at most doubling every weighted sum.
RSequence strictify(const RSequence& base);

}  // namespace hardylab
