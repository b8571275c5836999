#pragma once

#include <cstdint>

namespace fdbeam {

/// Tally of the semantic operations behind a feasible-set construction or a
/// constraint check: one unit per largest-singular-value evaluation, per
/// column-norm evaluation, per matrix-vector product and per full beam-combo
/// test. Counts are work classes, not FLOPs.
struct OpCounter {
  std::uint64_t svd_count = 0;
  std::uint64_t colnorm_count = 0;
  std::uint64_t matvec_count = 0;
  std::uint64_t combo_tests = 0;

  void merge(const OpCounter& other) {
    svd_count += other.svd_count;
    colnorm_count += other.colnorm_count;
    matvec_count += other.matvec_count;
    combo_tests += other.combo_tests;
  }

  void reset() { *this = OpCounter{}; }
};

}  // namespace fdbeam
