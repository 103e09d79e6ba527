// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference computations for triangle overlap areas, and the
// case corpora they are checked on. Nothing here calls into the barycentric
// code in geom.cpp.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "awarp/geom.hpp"

namespace awarp::oracle {

/// Sutherland-Hodgman clip of t1 by the three edge half-planes of t2,
/// followed by the shoelace formula.
double clip_oracle_area(const Triangle2& t1, const Triangle2& t2);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo estimate of |t1 ∩ t2| over the bounding box of t1. Samples
/// are jittered on a ceil(sqrt(n)) grid; the reported standard error is the
/// i.i.d. binomial one, which bounds the stratified estimator's error.
/// Deterministic for a fixed seed.
McEstimate mc_oracle_area(const Triangle2& t1, const Triangle2& t2,
                          std::uint64_t n_samples, std::uint64_t seed);

struct CorpusCase {
  std::string label;
  Triangle2 t1;
  Triangle2 t2;
};

/// Generic (non-degenerate) overlap configurations, one per topological
/// class, labelled v1·is·s2·v2 (T1 vertices in T2, side crossings, T2 sides
/// crossed, T2 vertices in T1).
std::vector<CorpusCase> topological_corpus();

/// Configurations with vertices on sides, shared vertices and collinear
/// sides: one integer-lattice representative per incidence signature.
std::vector<CorpusCase> degenerate_corpus();

/// Seeded random pairs in the unit square; every fifth pair has a vertex of
/// t1 snapped onto a side of t2.
std::vector<CorpusCase> random_corpus(std::size_t count, std::uint64_t seed);

struct CaseResult {
  std::string group;
  std::string label;
  double area = 0.0;
  double clip_area = 0.0;
  double mc_area = 0.0;
  double mc_stderr = 0.0;
  bool symmetric = false;
  bool clip_ok = false;
  bool mc_ok = false;

  bool passed() const { return symmetric && clip_ok && mc_ok; }
};

struct SelftestOptions {
  std::size_t random_pairs = 10000;
  std::uint64_t mc_samples = 1000000;
  std::uint64_t seed = 20240917;
  /// 0: one per core. Results do not depend on it.
  unsigned threads = 0;
};

struct SelftestSummary {
  std::size_t topological_total = 0, topological_passed = 0;
  std::size_t degenerate_total = 0, degenerate_passed = 0;
  std::size_t random_total = 0, random_passed = 0;

  bool all_passed() const {
    return topological_passed == topological_total &&
           degenerate_passed == degenerate_total && random_passed == random_total;
  }
};

/// Runs every corpus through triangle_intersection_area and both oracles.
/// Tolerances: 1e-10 * max(|A1|,|A2|) against the clip oracle, 4 standard
/// errors against Monte Carlo, 1e-12 absolute for argument symmetry.
SelftestSummary run_selftest(const SelftestOptions& opts,
                             const std::function<void(const CaseResult&)>& on_case);

}  // namespace awarp::oracle
