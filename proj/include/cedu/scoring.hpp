#pragma once
// Competition metrics and submission validation.
//
// Tasks 1/3 are scored with a 4-category relation F1 over unordered
// construct pairs; tasks 2/4 with RMSE variants.  Submission archives are
// checked structurally before scoring and every failed check carries a
// distinct machine-readable code.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cedu/npy.hpp"
#include "cedu/types.hpp"

namespace cedu {

// Unordered construct pairs {i, j}, i < j, over which the relation
// metrics are computed.
struct EdgeMask {
  std::vector<std::pair<int, int>> pairs;

  static EdgeMask all_pairs(int n);
  void validate(int n) const;  // in-range, i < j, no duplicates
};

// Relation F1 between a submitted and a true aggregated graph over the
// masked pairs.  Both 0/0 ratios and an all-zero harmonic mean give 0.
double f1_discovery(const AggregatedGraph& submitted, const AggregatedGraph& truth,
                    const EdgeMask& mask);

// Point ([D, n, n]) or sampled ([D, s, n, n]) binary discovery submission.
struct DiscoverySubmission {
  std::vector<std::vector<AggregatedGraph>> samples;  // [dataset][sample]

  int num_datasets() const { return static_cast<int>(samples.size()); }
  // Decodes a bool/int array of either rank; validates binary entries.
  static DiscoverySubmission from_npy(const NpyArray& array);
};

// Mean over datasets of (mean over samples of per-sample F1).
double f1_mean(const DiscoverySubmission& submission,
               const std::vector<AggregatedGraph>& truths, const EdgeMask& mask);

// Task-2 RMSE: per-dataset root of the mean squared error over queries,
// then the arithmetic mean across datasets.
double rmse_task2(const Matrix& estimates, const Matrix& truths);

// Task-4 RMSE: a single flat root-mean-square error.
double rmse_task4(const Vector& estimates, const Vector& truths);

// Leaderboard ordering: tasks 1/3 rank by F1 descending, tasks 2/4 by
// negative RMSE descending; ties break towards the earlier timestamp.
struct RankKey {
  double key = 0.0;
  std::int64_t timestamp = 0;
};
RankKey rank_key(double score, int task, std::int64_t timestamp = 0);
bool ranks_before(const RankKey& a, const RankKey& b);

enum class SubmissionCode {
  zip_parse,
  zip_empty,
  zip_multi_entry,
  zip_member_name,
  zip_compressed,
  npy_magic,
  npy_dtype,
  npy_fortran,
  npy_truncated,
  shape_mismatch,
  disc_not_binary,
  cate_nan,
};
const char* submission_code_name(SubmissionCode code);

struct SubmissionCheck {
  SubmissionCode code;
  std::string message;
};

// What the scorer expects of a submission archive.
struct ExpectedShape {
  int task = 1;            // 1..4
  int num_datasets = 5;    // leading dimension for tasks 1/2
  int num_constructs = 50; // matrix size for tasks 1/3
  int num_queries = 10;    // per dataset (task 2) or total (task 4)
};

struct ValidatedSubmission {
  bool ok = false;
  std::vector<SubmissionCheck> errors;
  // Submission errors do not consume the daily quota.
  bool counts_against_quota = false;
  std::optional<NpyArray> array;  // present when ok
  int num_samples = 0;            // s for sampled discovery submissions, else 1
};

// Full structural validation of a submission archive: single stored
// entry, correct member name (adj_matrix.npy for tasks 1/3,
// cate_estimate.npy for 2/4), well-formed NPY of an accepted dtype and
// shape, binary-valued for discovery, finite for CATE.
ValidatedSubmission validate_submission(const std::vector<std::uint8_t>& zip_bytes,
                                        const ExpectedShape& expected);

// Score report emitted by the CLI (JSON object with exactly these
// fields; rank_key is included so redacted reports remain rankable).
struct ScoreReport {
  int task = 0;
  std::vector<double> per_dataset;
  std::optional<double> final_score;
  bool redacted = false;
  std::vector<SubmissionCheck> errors;
  RankKey rank;

  std::string to_json() const;
};

}  // namespace cedu
