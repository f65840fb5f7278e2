#include "cedu/scoring.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include <json.hpp>

#include "cedu/graph.hpp"
#include "cedu/zipfile.hpp"

namespace cedu {

EdgeMask EdgeMask::all_pairs(int n) {
  EdgeMask mask;
  mask.pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) mask.pairs.emplace_back(i, j);
  return mask;
}

void EdgeMask::validate(int n) const {
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ValidationError("edge mask: pair out of range");
    if (i >= j) throw ValidationError("edge mask: pairs must satisfy i < j");
    if (!seen.emplace(i, j).second)
      throw ValidationError("edge mask: duplicate pair");
  }
}

double f1_discovery(const AggregatedGraph& submitted, const AggregatedGraph& truth,
                    const EdgeMask& mask) {
  submitted.validate();
  truth.validate();
  if (submitted.size() != truth.size())
    throw ValidationError("f1_discovery: dimension mismatch");
  mask.validate(truth.size());

  // Integer tallies keep the score an exact ratio: with
  //   a = matched pairs among submitted-nonzero,   b = submitted-nonzero,
  //   c = matched pairs among truth-nonzero,       d = truth-nonzero,
  // the harmonic mean of a/b and c/d is 2ac / (ad + cb).
  std::int64_t a = 0, b = 0, c = 0, d = 0;
  for (const auto& [i, j] : mask.pairs) {
    const RelationCategory rs = relation_category(submitted, i, j);
    const RelationCategory rt = relation_category(truth, i, j);
    const bool match = rs == rt;
    if (rs != RelationCategory::none) {
      ++b;
      if (match) ++a;
    }
    if (rt != RelationCategory::none) {
      ++d;
      if (match) ++c;
    }
  }
  const std::int64_t denom = a * d + c * b;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(a * c) / static_cast<double>(denom);
}

DiscoverySubmission DiscoverySubmission::from_npy(const NpyArray& array) {
  if (array.dtype == NpyDtype::f8)
    throw ValidationError(
        "discovery submission: array must be bool or int64, not float64");
  if (array.shape.size() != 3 && array.shape.size() != 4)
    throw ValidationError("discovery submission: expected rank 3 or 4, got rank " +
                          std::to_string(array.shape.size()));
  const bool sampled = array.shape.size() == 4;
  const std::size_t datasets = array.shape[0];
  const std::size_t nsamples = sampled ? array.shape[1] : 1;
  const std::size_t rows = array.shape[sampled ? 2 : 1];
  const std::size_t cols = array.shape[sampled ? 3 : 2];
  if (rows != cols)
    throw ValidationError("discovery submission: adjacency matrices must be square");
  if (datasets == 0 || nsamples == 0)
    throw ValidationError("discovery submission: empty leading dimension");

  auto value_at = [&](std::size_t flat) -> std::int64_t {
    if (array.dtype == NpyDtype::b1) return array.data[flat];
    std::int64_t v;
    std::memcpy(&v, array.data.data() + flat * 8, 8);
    return v;
  };

  DiscoverySubmission submission;
  submission.samples.resize(datasets);
  std::size_t flat = 0;
  for (std::size_t dIdx = 0; dIdx < datasets; ++dIdx) {
    submission.samples[dIdx].reserve(nsamples);
    for (std::size_t s = 0; s < nsamples; ++s) {
      AggregatedGraph graph;
      graph.adj = IntMatrix::Zero(static_cast<int>(rows), static_cast<int>(cols));
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t cIdx = 0; cIdx < cols; ++cIdx, ++flat) {
          const std::int64_t v = value_at(flat);
          if (v != 0 && v != 1)
            throw ValidationError("discovery submission: entries must be 0 or 1");
          graph.adj(static_cast<int>(r), static_cast<int>(cIdx)) = static_cast<int>(v);
        }
      // The diagonal never enters the pairwise metrics; drop it rather
      // than reject otherwise valid binary submissions.
      graph.adj.diagonal().setZero();
      submission.samples[dIdx].push_back(std::move(graph));
    }
  }
  return submission;
}

double f1_mean(const DiscoverySubmission& submission,
               const std::vector<AggregatedGraph>& truths, const EdgeMask& mask) {
  if (submission.samples.empty())
    throw ValidationError("f1_mean: empty submission");
  if (submission.samples.size() != truths.size())
    throw ValidationError("f1_mean: need one truth per dataset");
  double total = 0.0;
  for (std::size_t d = 0; d < truths.size(); ++d) {
    const auto& samples = submission.samples[d];
    if (samples.empty()) throw ValidationError("f1_mean: dataset without samples");
    double dataset_score = 0.0;
    for (const AggregatedGraph& g : samples)
      dataset_score += f1_discovery(g, truths[d], mask);
    total += dataset_score / static_cast<double>(samples.size());
  }
  return total / static_cast<double>(truths.size());
}

double rmse_task2(const Matrix& estimates, const Matrix& truths) {
  if (estimates.rows() != truths.rows() || estimates.cols() != truths.cols())
    throw ValidationError("rmse_task2: shape mismatch");
  if (estimates.rows() == 0 || estimates.cols() == 0)
    throw ValidationError("rmse_task2: empty input");
  if (!estimates.allFinite() || !truths.allFinite())
    throw ValidationError("rmse_task2: missing values");
  double total = 0.0;
  for (Eigen::Index d = 0; d < estimates.rows(); ++d) {
    const double mse =
        (estimates.row(d) - truths.row(d)).squaredNorm() /
        static_cast<double>(estimates.cols());
    total += std::sqrt(mse);
  }
  return total / static_cast<double>(estimates.rows());
}

double rmse_task4(const Vector& estimates, const Vector& truths) {
  if (estimates.size() != truths.size())
    throw ValidationError("rmse_task4: shape mismatch");
  if (estimates.size() == 0) throw ValidationError("rmse_task4: empty input");
  if (!estimates.allFinite() || !truths.allFinite())
    throw ValidationError("rmse_task4: missing values");
  return std::sqrt((estimates - truths).squaredNorm() /
                   static_cast<double>(estimates.size()));
}

RankKey rank_key(double score, int task, std::int64_t timestamp) {
  if (task < 1 || task > 4) throw ValidationError("rank_key: task must be 1..4");
  RankKey key;
  key.key = (task == 2 || task == 4) ? -score : score;
  key.timestamp = timestamp;
  return key;
}

bool ranks_before(const RankKey& a, const RankKey& b) {
  if (a.key != b.key) return a.key > b.key;
  return a.timestamp < b.timestamp;
}

const char* submission_code_name(SubmissionCode code) {
  switch (code) {
    case SubmissionCode::zip_parse: return "ZIP_PARSE";
    case SubmissionCode::zip_empty: return "ZIP_EMPTY";
    case SubmissionCode::zip_multi_entry: return "ZIP_MULTI_ENTRY";
    case SubmissionCode::zip_member_name: return "ZIP_MEMBER_NAME";
    case SubmissionCode::zip_compressed: return "ZIP_COMPRESSED";
    case SubmissionCode::npy_magic: return "NPY_MAGIC";
    case SubmissionCode::npy_dtype: return "NPY_DTYPE";
    case SubmissionCode::npy_fortran: return "NPY_FORTRAN";
    case SubmissionCode::npy_truncated: return "NPY_TRUNCATED";
    case SubmissionCode::shape_mismatch: return "SHAPE_MISMATCH";
    case SubmissionCode::disc_not_binary: return "DISC_NOT_BINARY";
    case SubmissionCode::cate_nan: return "CATE_NAN";
  }
  return "";
}

namespace {

SubmissionCode zip_code(ZipErrorCode code) {
  switch (code) {
    case ZipErrorCode::parse: return SubmissionCode::zip_parse;
    case ZipErrorCode::empty: return SubmissionCode::zip_empty;
    case ZipErrorCode::multi_entry: return SubmissionCode::zip_multi_entry;
    case ZipErrorCode::member_name: return SubmissionCode::zip_member_name;
    case ZipErrorCode::compressed: return SubmissionCode::zip_compressed;
  }
  return SubmissionCode::zip_parse;
}

SubmissionCode npy_code(const std::string& message) {
  if (message.rfind("NPY_DTYPE", 0) == 0) return SubmissionCode::npy_dtype;
  if (message.rfind("NPY_FORTRAN", 0) == 0) return SubmissionCode::npy_fortran;
  if (message.rfind("NPY_TRUNCATED", 0) == 0) return SubmissionCode::npy_truncated;
  return SubmissionCode::npy_magic;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace

ValidatedSubmission validate_submission(const std::vector<std::uint8_t>& zip_bytes,
                                        const ExpectedShape& expected) {
  if (expected.task < 1 || expected.task > 4)
    throw ValidationError("validate_submission: task must be 1..4");
  const bool discovery = expected.task == 1 || expected.task == 3;
  const std::string member = discovery ? "adj_matrix.npy" : "cate_estimate.npy";

  ValidatedSubmission result;
  auto reject = [&](SubmissionCode code, std::string message) {
    result.errors.push_back({code, std::move(message)});
    return result;
  };

  std::vector<std::uint8_t> payload;
  try {
    payload = unpack_archive(zip_bytes, member);
  } catch (const ZipError& e) {
    return reject(zip_code(e.code()), e.what());
  }

  NpyArray array;
  try {
    array = read_npy(payload);
  } catch (const ValidationError& e) {
    return reject(npy_code(e.what()), e.what());
  }

  const std::size_t D = static_cast<std::size_t>(expected.num_datasets);
  const std::size_t n = static_cast<std::size_t>(expected.num_constructs);
  const std::size_t q = static_cast<std::size_t>(expected.num_queries);
  const auto& shape = array.shape;

  if (discovery) {
    bool shape_ok = false;
    int samples = 1;
    if (expected.task == 1) {
      if (shape.size() == 3) shape_ok = shape[0] == D && shape[1] == n && shape[2] == n;
      if (shape.size() == 4 && shape[1] >= 1) {
        shape_ok = shape[0] == D && shape[2] == n && shape[3] == n;
        samples = static_cast<int>(shape[1]);
      }
    } else {  // task 3: [n, n] or [s, n, n]
      if (shape.size() == 2) shape_ok = shape[0] == n && shape[1] == n;
      if (shape.size() == 3 && shape[0] >= 1) {
        shape_ok = shape[1] == n && shape[2] == n;
        samples = static_cast<int>(shape[0]);
      }
    }
    if (!shape_ok)
      return reject(SubmissionCode::shape_mismatch,
                    "SHAPE_MISMATCH: got " + shape_string(shape));
    if (array.dtype == NpyDtype::f8)
      return reject(SubmissionCode::disc_not_binary,
                    "DISC_NOT_BINARY: discovery submissions must be bool or int64");
    const std::size_t count = array.element_count();
    for (std::size_t i = 0; i < count; ++i) {
      std::int64_t v;
      if (array.dtype == NpyDtype::b1) {
        v = array.data[i];
      } else {
        std::memcpy(&v, array.data.data() + i * 8, 8);
      }
      if (v != 0 && v != 1)
        return reject(SubmissionCode::disc_not_binary,
                      "DISC_NOT_BINARY: entry " + std::to_string(i) + " is " +
                          std::to_string(v));
    }
    result.num_samples = samples;
  } else {
    if (array.dtype != NpyDtype::f8)
      return reject(SubmissionCode::npy_dtype,
                    "NPY_DTYPE: CATE submissions must be float64");
    bool shape_ok = false;
    if (expected.task == 2)
      shape_ok = shape.size() == 2 && shape[0] == D && shape[1] == q;
    else
      shape_ok = shape.size() == 1 && shape[0] == q;
    if (!shape_ok)
      return reject(SubmissionCode::shape_mismatch,
                    "SHAPE_MISMATCH: got " + shape_string(shape));
    for (double v : array.as_doubles())
      if (!std::isfinite(v))
        return reject(SubmissionCode::cate_nan,
                      "CATE_NAN: submission contains a non-finite value");
    result.num_samples = 1;
  }

  result.ok = true;
  result.array = std::move(array);
  return result;
}

std::string ScoreReport::to_json() const {
  nlohmann::json j;
  j["task"] = task;
  j["per_dataset"] = per_dataset;
  if (final_score) j["final"] = *final_score;
  else j["final"] = nullptr;
  j["redacted"] = redacted;
  nlohmann::json errs = nlohmann::json::array();
  for (const SubmissionCheck& check : errors) {
    nlohmann::json e;
    e["code"] = submission_code_name(check.code);
    e["message"] = check.message;
    errs.push_back(std::move(e));
  }
  j["errors"] = std::move(errs);
  j["rank_key"] = rank.key;
  j["counts_against_quota"] = false;
  return j.dump(2);
}

}  // namespace cedu
