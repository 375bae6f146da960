#include "hardylab/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardylab/errors.hpp"
#include "hardylab/kahan.hpp"

namespace hardylab {

namespace {

void require_positive(std::span<const double> xs, std::uint64_t N,
                      const char* what) {
  if (N == 0 || xs.size() < N) {
    throw usage_error(std::string(what) + " must cover [1, N] with N >= 1");
  }
  for (std::uint64_t i = 0; i < N; ++i) {
    if (!(xs[i] > 0.0) || !std::isfinite(xs[i])) {
      throw numerical_fault(std::string(what) + " must be strictly positive and finite");
    }
  }
}

}  // namespace

std::span<const std::uint64_t> BlockPartition::r_boundaries() const {
  return kind == BlockCase::case_one ? std::span<const std::uint64_t>(boundaries)
                                     : std::span<const std::uint64_t>(super_boundaries);
}

std::span<const double> BlockPartition::r_values() const {
  return kind == BlockCase::case_one ? std::span<const double>(r_block)
                                     : std::span<const double>(super_r);
}

BlockPartition build_blocks_case1(std::span<const double> c,
                                  std::span<const double> weights,
                                  std::uint64_t N) {
  require_positive(c, N, "ratio sequence");
  const bool unit = weights.empty();
  if (!unit) require_positive(weights, N, "weights");
  const auto w = [&](std::uint64_t n) { return unit ? 1.0 : weights[n - 1]; };

  // Suffix minima are nondecreasing in n, so "c_m > t for all scanned m >= n"
  // becomes a binary search.
  std::vector<double> sufmin(N);
  sufmin[N - 1] = c[N - 1];
  for (std::uint64_t i = N - 1; i-- > 0;) sufmin[i] = std::min(c[i], sufmin[i + 1]);
  if (!(sufmin[N - 1] > 1.0)) {
    throw numerical_fault(
        "ratio sequence never exceeds 1 on the scanned range; the block "
        "construction needs ratios growing without bound");
  }

  BlockPartition p;
  p.kind = BlockCase::case_one;
  p.boundaries.push_back(0);

  for (std::uint64_t t = 1;; ++t) {
    const auto it = std::upper_bound(sufmin.begin(), sufmin.end(),
                                     static_cast<double>(t));
    if (it == sufmin.end()) break;
    const std::uint64_t cand = static_cast<std::uint64_t>(it - sufmin.begin()) + 1;

    std::uint64_t start = p.boundaries.back();
    std::uint64_t end = std::max(cand, start + 1);
    if (p.boundaries.size() >= 2) {
      const std::uint64_t prev_gap = start - p.boundaries[p.boundaries.size() - 2];
      end = std::max(end, start + prev_gap);
    }
    if (end > N) break;

    const std::size_t b = p.boundaries.size() - 1;  // block index being closed
    KahanSum ws;
    double cmin = std::numeric_limits<double>::infinity();
    for (std::uint64_t n = start + 1; n <= end; ++n) {
      ws.add(w(n));
      cmin = std::min(cmin, c[n - 1]);
    }
    if (b >= 1) {
      // Keep R_b <= R_{b-1}: extend the block until its weight reaches
      // W_{b-1} * b^2 / (b+1)^2. A no-op for unit weights, where gap
      // inflation already guarantees it.
      const double bb = static_cast<double>(b);
      const double needed = p.block_weight[b - 1] * (bb * bb) / ((bb + 1.0) * (bb + 1.0));
      while (ws.value() < needed && end < N) {
        ++end;
        ws.add(w(end));
        cmin = std::min(cmin, c[end - 1]);
      }
      if (ws.value() < needed) break;  // data exhausted mid-block
    }

    p.boundaries.push_back(end);
    p.block_weight.push_back(ws.value());
    p.block_inf_c.push_back(cmin);
    const double kk = static_cast<double>(b) + 1.0;
    p.r_block.push_back(1.0 / (kk * kk * ws.value()));
  }

  for (std::size_t k = 1; k < p.r_block.size(); ++k) {
    if (p.r_block[k] > p.r_block[k - 1]) {
      throw numerical_fault("block damping values failed to be nonincreasing");
    }
  }
  p.short_partition = p.r_block.size() < 2;
  return p;
}

BlockPartition build_blocks_case2(std::span<const double> a,
                                  std::span<const double> c, std::uint64_t N) {
  require_positive(a, N, "series");
  require_positive(c, N, "ratio sequence");

  BlockPartition p;
  p.kind = BlockCase::case_two;
  p.boundaries.push_back(0);

  KahanSum chunk;
  double cmin = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1; n <= N; ++n) {
    chunk.add(a[n - 1]);
    cmin = std::min(cmin, c[n - 1]);
    // Compensated comparison: the folded sum may round to 1 while the true
    // chunk mass is still short of it.
    if (chunk.excess_over(1.0) >= 0.0) {
      p.boundaries.push_back(n);
      p.block_weight.push_back(chunk.value());
      p.block_inf_c.push_back(cmin);
      chunk.reset();
      cmin = std::numeric_limits<double>::infinity();
    }
  }
  if (p.block_weight.empty()) {
    throw numerical_fault(
        "total mass of the series over [1, N] is below 1; no unit chunk closes");
  }

  const std::uint64_t K = p.block_weight.size();
  auto derived = std::make_shared<BlockPartition>(
      build_blocks_case1(p.block_inf_c, p.block_weight, K));

  p.super_boundaries.reserve(derived->boundaries.size());
  for (const std::uint64_t d : derived->boundaries) {
    p.super_boundaries.push_back(p.boundaries[d]);
  }
  p.super_r = derived->r_block;

  // Per-chunk R: the derived block containing the chunk, last R past the end.
  p.r_block.resize(K);
  std::size_t j = 0;
  for (std::uint64_t i = 0; i < K; ++i) {
    while (j + 1 < derived->boundaries.size() - 1 && i + 1 > derived->boundaries[j + 1]) {
      ++j;
    }
    p.r_block[i] = (i + 1 > derived->boundaries.back())
                       ? derived->r_block.back()
                       : derived->r_block[j];
  }

  p.short_partition = derived->short_partition;
  p.derived = std::move(derived);
  return p;
}

RSequence emit_r(std::span<const std::uint64_t> boundaries,
                 std::span<const double> r_block, std::uint64_t N) {
  if (boundaries.size() != r_block.size() + 1 || boundaries.empty() ||
      boundaries[0] != 0 || N == 0) {
    throw usage_error("damping emission needs boundaries (starting at 0) and "
                      "one r per block");
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) {
      throw usage_error("block boundaries must be strictly increasing");
    }
  }
  for (std::size_t k = 0; k < r_block.size(); ++k) {
    if (!(r_block[k] > 0.0) || (k > 0 && r_block[k] > r_block[k - 1])) {
      throw numerical_fault("per-block damping must be positive and nonincreasing");
    }
  }

  RSequence r;
  r.values.resize(N);
  std::size_t k = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    while (k + 1 < r_block.size() && n > boundaries[k + 1]) ++k;
    r.values[n - 1] = r_block[k];  // past the last boundary this extends R_last
  }
  return r;
}

RSequence strictify(const RSequence& base) {
  RSequence out;
  out.values.resize(base.values.size());
  out.strictified = true;
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    out.values[i] = base.values[i] * (1.0 + 1.0 / n);
  }
  for (std::size_t i = 1; i < out.values.size(); ++i) {
    if (!(out.values[i] < out.values[i - 1])) {
      throw numerical_fault("strictified damping failed to decrease strictly");
    }
  }
  return out;
}

}  // namespace hardylab
