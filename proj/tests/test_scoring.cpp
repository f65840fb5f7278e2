#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cedu/npy.hpp"
#include "cedu/rng.hpp"
#include "cedu/scoring.hpp"
#include "cedu/zipfile.hpp"

using namespace cedu;

namespace {

AggregatedGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  AggregatedGraph graph;
  graph.adj = IntMatrix::Zero(n, n);
  for (const auto& [i, j] : edges) graph.adj(i, j) = 1;
  return graph;
}

AggregatedGraph random_graph(int n, Rng& rng, double density) {
  AggregatedGraph graph;
  graph.adj = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rng.uniform() < density) graph.adj(i, j) = 1;
  return graph;
}

// Independent scorer: classifies each unordered pair straight from the
// adjacency entries and applies the published count formula.
double reference_f1(const AggregatedGraph& submitted, const AggregatedGraph& truth) {
  auto category = [](const AggregatedGraph& g, int i, int j) {
    return g.adj(i, j) + 2 * g.adj(j, i);
  };
  std::int64_t a = 0, b = 0, c = 0, d = 0;
  const int n = truth.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int rs = category(submitted, i, j);
      const int rt = category(truth, i, j);
      if (rs != 0) {
        ++b;
        if (rs == rt) ++a;
      }
      if (rt != 0) {
        ++d;
        if (rs == rt) ++c;
      }
    }
  const std::int64_t denom = a * d + c * b;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(a) * static_cast<double>(c) /
         static_cast<double>(denom);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xffff));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

// Archive builder for shapes pack_archive refuses to produce (multiple
// entries, compressed members, zero entries).
std::vector<std::uint8_t> build_archive(
    const std::vector<std::pair<std::string, std::vector<std::uint8_t>>>& members,
    std::uint16_t method = 0) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint32_t> offsets;
  for (const auto& [name, payload] : members) {
    offsets.push_back(static_cast<std::uint32_t>(out.size()));
    put32(out, 0x04034b50u);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put16(out, 0);
    put16(out, 0);
    put32(out, crc32_ieee(payload.data(), payload.size()));
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put16(out, static_cast<std::uint16_t>(name.size()));
    put16(out, 0);
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), payload.begin(), payload.end());
  }
  const std::uint32_t central_offset = static_cast<std::uint32_t>(out.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& [name, payload] = members[i];
    put32(out, 0x02014b50u);
    put16(out, 20);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put16(out, 0);
    put16(out, 0);
    put32(out, crc32_ieee(payload.data(), payload.size()));
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put16(out, static_cast<std::uint16_t>(name.size()));
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    put32(out, 0);
    put32(out, offsets[i]);
    out.insert(out.end(), name.begin(), name.end());
  }
  const std::uint32_t central_size =
      static_cast<std::uint32_t>(out.size()) - central_offset;
  put32(out, 0x06054b50u);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(members.size()));
  put16(out, static_cast<std::uint16_t>(members.size()));
  put32(out, central_size);
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

NpyArray bool_array(std::vector<std::size_t> shape, std::vector<std::uint8_t> values) {
  return NpyArray::from_bools(std::move(shape), values);
}

std::vector<std::uint8_t> wrap(const std::string& member, const NpyArray& array) {
  return pack_archive(member, write_npy(array));
}

ExpectedShape small_expected(int task) {
  ExpectedShape e;
  e.task = task;
  e.num_datasets = 2;
  e.num_constructs = 4;
  e.num_queries = 3;
  return e;
}

SubmissionCode sole_code(const ValidatedSubmission& v) {
  REQUIRE(!v.ok);
  REQUIRE(v.errors.size() == 1);
  return v.errors[0].code;
}

}  // namespace

TEST_CASE("f1_discovery agrees with an independent pair-count scorer") {
  Rng rng(314);
  for (int round = 0; round < 400; ++round) {
    const int n = 2 + rng.uniform_int(5);
    const double density = rng.uniform();
    const AggregatedGraph submitted = random_graph(n, rng, density);
    const AggregatedGraph truth = random_graph(n, rng, rng.uniform());
    const double got = f1_discovery(submitted, truth, EdgeMask::all_pairs(n));
    CHECK(got == reference_f1(submitted, truth));
  }
}

TEST_CASE("the worked three-construct example scores exactly 0.4") {
  // Truth: 0 -> 1, and 1 <-> 2.  Submitted: 0 -> 1, 0 -> 2, 2 -> 1.
  const AggregatedGraph truth = make_graph(3, {{0, 1}, {1, 2}, {2, 1}});
  const AggregatedGraph submitted = make_graph(3, {{0, 1}, {0, 2}, {2, 1}});
  CHECK(f1_discovery(submitted, truth, EdgeMask::all_pairs(3)) == 0.4);
}

TEST_CASE("F1 edge cases") {
  const AggregatedGraph truth = make_graph(4, {{0, 1}, {2, 3}, {3, 2}});
  const EdgeMask mask = EdgeMask::all_pairs(4);

  CHECK(f1_discovery(truth, truth, mask) == 1.0);
  CHECK(f1_discovery(make_graph(4, {}), truth, mask) == 0.0);
  CHECK(f1_discovery(make_graph(4, {}), make_graph(4, {}), mask) == 0.0);
  // All predictions wrong: matches are zero on both sides.
  CHECK(f1_discovery(make_graph(4, {{1, 0}, {1, 2}}), truth, mask) == 0.0);

  // Swapping submission and truth swaps precision and recall; the
  // harmonic mean is symmetric.
  const AggregatedGraph partial = make_graph(4, {{0, 1}, {2, 3}});
  CHECK(f1_discovery(partial, truth, mask) ==
        doctest::Approx(f1_discovery(truth, partial, mask)).epsilon(1e-15));

  CHECK_THROWS_AS(f1_discovery(partial, make_graph(3, {}), mask), ValidationError);
}

TEST_CASE("edge masks restrict which pairs are scored") {
  const EdgeMask all = EdgeMask::all_pairs(3);
  REQUIRE(all.pairs.size() == 3);
  CHECK(all.pairs[0] == std::pair<int, int>(0, 1));
  CHECK(all.pairs[2] == std::pair<int, int>(1, 2));
  CHECK_NOTHROW(all.validate(3));

  EdgeMask bad;
  bad.pairs = {{1, 0}};
  CHECK_THROWS_AS(bad.validate(3), ValidationError);
  bad.pairs = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(bad.validate(3), ValidationError);
  bad.pairs = {{0, 3}};
  CHECK_THROWS_AS(bad.validate(3), ValidationError);
  bad.pairs = {{-1, 1}};
  CHECK_THROWS_AS(bad.validate(3), ValidationError);

  // Truth has edges only inside {0, 1}; masking out that pair leaves a
  // perfect (empty) agreement on (1, 2) but no nonzero counts, so 0.
  const AggregatedGraph truth = make_graph(3, {{0, 1}});
  EdgeMask narrow;
  narrow.pairs = {{1, 2}};
  CHECK(f1_discovery(truth, truth, narrow) == 0.0);
  narrow.pairs = {{0, 1}};
  CHECK(f1_discovery(truth, truth, narrow) == 1.0);
}

TEST_CASE("DiscoverySubmission::from_npy decodes point and sampled arrays") {
  // Two datasets, 3 x 3, point submission.
  std::vector<std::uint8_t> bits(2 * 3 * 3, 0);
  bits[1] = 1;                // dataset 0: edge (0, 1)
  bits[9 + 5] = 1;            // dataset 1: edge (1, 2)
  const DiscoverySubmission point = DiscoverySubmission::from_npy(bool_array({2, 3, 3}, bits));
  REQUIRE(point.num_datasets() == 2);
  REQUIRE(point.samples[0].size() == 1);
  CHECK(point.samples[0][0].adj(0, 1) == 1);
  CHECK(point.samples[0][0].adj.sum() == 1);
  CHECK(point.samples[1][0].adj(1, 2) == 1);

  // Sampled rank-4 with two samples per dataset.
  std::vector<std::uint8_t> sampled_bits(1 * 2 * 3 * 3, 0);
  sampled_bits[1] = 1;        // sample 0: edge (0, 1)
  sampled_bits[9 + 3] = 1;    // sample 1: edge (1, 0)
  const DiscoverySubmission sampled =
      DiscoverySubmission::from_npy(bool_array({1, 2, 3, 3}, sampled_bits));
  REQUIRE(sampled.num_datasets() == 1);
  REQUIRE(sampled.samples[0].size() == 2);
  CHECK(sampled.samples[0][0].adj(0, 1) == 1);
  CHECK(sampled.samples[0][1].adj(1, 0) == 1);

  // int64 zeros and ones are accepted; other values are not.
  CHECK_NOTHROW(DiscoverySubmission::from_npy(
      NpyArray::from_int64({1, 2, 2}, {0, 1, 1, 0})));
  CHECK_THROWS_AS(DiscoverySubmission::from_npy(
                      NpyArray::from_int64({1, 2, 2}, {0, 2, 0, 0})),
                  ValidationError);
  // float arrays, bad ranks and non-square matrices are rejected.
  CHECK_THROWS_AS(DiscoverySubmission::from_npy(
                      NpyArray::from_doubles({1, 2, 2}, {0, 1, 1, 0})),
                  ValidationError);
  CHECK_THROWS_AS(DiscoverySubmission::from_npy(bool_array({4}, {0, 1, 0, 1})),
                  ValidationError);
  CHECK_THROWS_AS(DiscoverySubmission::from_npy(bool_array({1, 2, 3}, std::vector<std::uint8_t>(6, 0))),
                  ValidationError);

  // A submitted diagonal is dropped rather than rejected: the metric
  // never reads it.
  const DiscoverySubmission diag =
      DiscoverySubmission::from_npy(bool_array({1, 2, 2}, {1, 1, 0, 1}));
  CHECK(diag.samples[0][0].adj(0, 0) == 0);
  CHECK(diag.samples[0][0].adj(1, 1) == 0);
  CHECK(diag.samples[0][0].adj(0, 1) == 1);
}

TEST_CASE("f1_mean averages samples within datasets, then across datasets") {
  const AggregatedGraph truth = make_graph(3, {{0, 1}});
  const EdgeMask mask = EdgeMask::all_pairs(3);

  // Dataset 0: perfect; dataset 1: empty prediction.
  std::vector<std::uint8_t> bits(2 * 3 * 3, 0);
  bits[1] = 1;
  const DiscoverySubmission split = DiscoverySubmission::from_npy(bool_array({2, 3, 3}, bits));
  CHECK(f1_mean(split, {truth, truth}, mask) == doctest::Approx(0.5).epsilon(1e-15));

  // One dataset, two samples: perfect and empty average to 0.5.
  std::vector<std::uint8_t> sampled(1 * 2 * 3 * 3, 0);
  sampled[1] = 1;
  const DiscoverySubmission pair = DiscoverySubmission::from_npy(bool_array({1, 2, 3, 3}, sampled));
  CHECK(f1_mean(pair, {truth}, mask) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(f1_mean(split, {truth}, mask), ValidationError);
  CHECK_THROWS_AS(f1_mean(DiscoverySubmission{}, {}, mask), ValidationError);
}

TEST_CASE("rmse_task2 roots per dataset and then averages") {
  // One dataset off by 0.1 in a single query out of ten.
  Matrix truths = Matrix::Zero(5, 10);
  Matrix estimates = truths;
  estimates(0, 0) = 0.1;
  const double expected = std::sqrt(0.01 / 10.0) / 5.0;
  CHECK(rmse_task2(estimates, truths) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(rmse_task2(estimates, truths) ==
        doctest::Approx(0.0063245553203367585).epsilon(1e-12));

  // A uniform offset of delta gives exactly delta.
  const double delta = 0.017;
  Matrix shifted = truths.array() + delta;
  CHECK(rmse_task2(shifted, truths) == doctest::Approx(delta).epsilon(1e-12));

  CHECK(rmse_task2(truths, truths) == 0.0);
  CHECK_THROWS_AS(rmse_task2(Matrix::Zero(4, 10), truths), ValidationError);
  CHECK_THROWS_AS(rmse_task2(Matrix::Zero(0, 0), Matrix::Zero(0, 0)), ValidationError);
  Matrix poisoned = truths;
  poisoned(2, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rmse_task2(poisoned, truths), ValidationError);
}

TEST_CASE("rmse_task4 is a single flat root mean square") {
  Vector truth(1);
  truth << 0.4;
  Vector estimate(1);
  estimate << 0.6;
  CHECK(rmse_task4(estimate, truth) == doctest::Approx(0.2).epsilon(1e-12));

  Vector truths = Vector::Zero(4);
  Vector estimates(4);
  estimates << 0.1, -0.1, 0.1, -0.1;
  CHECK(rmse_task4(estimates, truths) == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(rmse_task4(Vector::Zero(3), truths), ValidationError);
  CHECK_THROWS_AS(rmse_task4(Vector::Zero(0), Vector::Zero(0)), ValidationError);
}

TEST_CASE("rank keys order leaderboards per task") {
  CHECK(rank_key(0.7, 1).key == 0.7);
  CHECK(rank_key(0.7, 3).key == 0.7);
  CHECK(rank_key(0.3, 2).key == -0.3);
  CHECK(rank_key(0.3, 4).key == -0.3);
  CHECK_THROWS_AS(rank_key(0.5, 0), ValidationError);
  CHECK_THROWS_AS(rank_key(0.5, 5), ValidationError);

  // Higher F1 first; lower RMSE first; ties to the earlier submission.
  CHECK(ranks_before(rank_key(0.9, 1, 50), rank_key(0.8, 1, 10)));
  CHECK(!ranks_before(rank_key(0.8, 1, 10), rank_key(0.9, 1, 50)));
  CHECK(ranks_before(rank_key(0.05, 2, 10), rank_key(0.06, 2, 5)));
  CHECK(ranks_before(rank_key(0.8, 1, 10), rank_key(0.8, 1, 20)));
  CHECK(!ranks_before(rank_key(0.8, 1, 20), rank_key(0.8, 1, 10)));
  CHECK(!ranks_before(rank_key(0.8, 1, 10), rank_key(0.8, 1, 10)));
}

TEST_CASE("validate_submission accepts every documented shape") {
  struct Accepted {
    int task;
    NpyArray array;
    int samples;
  };
  std::vector<Accepted> cases;
  cases.push_back({1, bool_array({2, 4, 4}, std::vector<std::uint8_t>(32, 0)), 1});
  cases.push_back({1, bool_array({2, 3, 4, 4}, std::vector<std::uint8_t>(96, 0)), 3});
  cases.push_back({3, bool_array({4, 4}, std::vector<std::uint8_t>(16, 0)), 1});
  cases.push_back({3, bool_array({2, 4, 4}, std::vector<std::uint8_t>(32, 0)), 2});
  cases.push_back({2, NpyArray::from_doubles({2, 3}, std::vector<double>(6, 0.25)), 1});
  cases.push_back({4, NpyArray::from_doubles({3}, {0.1, -0.2, 0.0}), 1});

  for (const Accepted& entry : cases) {
    const bool discovery = entry.task == 1 || entry.task == 3;
    const std::string member = discovery ? "adj_matrix.npy" : "cate_estimate.npy";
    const ValidatedSubmission v =
        validate_submission(wrap(member, entry.array), small_expected(entry.task));
    CHECK(v.ok);
    CHECK(v.errors.empty());
    CHECK(v.num_samples == entry.samples);
    CHECK(!v.counts_against_quota);
    REQUIRE(v.array.has_value());
    CHECK(v.array->shape == entry.array.shape);
  }
}

TEST_CASE("validate_submission reports a distinct code per failure") {
  const NpyArray good = bool_array({2, 4, 4}, std::vector<std::uint8_t>(32, 0));
  const std::vector<std::uint8_t> good_npy = write_npy(good);

  SUBCASE("archive failures") {
    const std::vector<std::uint8_t> garbage = {'n', 'o', 't', 'a', 'z', 'i', 'p'};
    CHECK(sole_code(validate_submission(garbage, small_expected(1))) ==
          SubmissionCode::zip_parse);

    CHECK(sole_code(validate_submission(build_archive({}), small_expected(1))) ==
          SubmissionCode::zip_empty);

    const auto multi = build_archive(
        {{"adj_matrix.npy", good_npy}, {"extra.npy", good_npy}});
    CHECK(sole_code(validate_submission(multi, small_expected(1))) ==
          SubmissionCode::zip_multi_entry);

    CHECK(sole_code(validate_submission(wrap("wrong.npy", good), small_expected(1))) ==
          SubmissionCode::zip_member_name);

    const auto deflated = build_archive({{"adj_matrix.npy", good_npy}}, 8);
    CHECK(sole_code(validate_submission(deflated, small_expected(1))) ==
          SubmissionCode::zip_compressed);

    // A flipped payload byte breaks the CRC, which is a parse failure.
    auto corrupted = pack_archive("adj_matrix.npy", good_npy);
    corrupted[30 + 14] ^= 0xff;
    CHECK(sole_code(validate_submission(corrupted, small_expected(1))) ==
          SubmissionCode::zip_parse);
  }

  SUBCASE("npy failures") {
    auto patch = [&](auto mutate) {
      std::vector<std::uint8_t> bytes = good_npy;
      mutate(bytes);
      return pack_archive("adj_matrix.npy", bytes);
    };
    CHECK(sole_code(validate_submission(
              patch([](auto& b) { b[0] ^= 0xff; }), small_expected(1))) ==
          SubmissionCode::npy_magic);
    CHECK(sole_code(validate_submission(
              patch([](auto& b) { b.resize(b.size() - 5); }), small_expected(1))) ==
          SubmissionCode::npy_truncated);

    auto edit_header = [&](const std::string& from, const std::string& to) {
      std::vector<std::uint8_t> bytes = good_npy;
      std::string header(bytes.begin(), bytes.end());
      const std::size_t pos = header.find(from);
      REQUIRE(pos != std::string::npos);
      REQUIRE(from.size() == to.size());
      std::copy(to.begin(), to.end(), bytes.begin() + static_cast<long>(pos));
      return pack_archive("adj_matrix.npy", bytes);
    };
    CHECK(sole_code(validate_submission(edit_header("|b1", "|u1"), small_expected(1))) ==
          SubmissionCode::npy_dtype);
    CHECK(sole_code(validate_submission(edit_header("False", "True,"), small_expected(1))) ==
          SubmissionCode::npy_fortran);
  }

  SUBCASE("payload failures") {
    // Wrong leading dimension.
    const NpyArray wrong_d = bool_array({3, 4, 4}, std::vector<std::uint8_t>(48, 0));
    CHECK(sole_code(validate_submission(wrap("adj_matrix.npy", wrong_d),
                                        small_expected(1))) ==
          SubmissionCode::shape_mismatch);
    // Non-square matrices never match the accepted shapes.
    const NpyArray rect = bool_array({2, 4, 5}, std::vector<std::uint8_t>(40, 0));
    CHECK(sole_code(validate_submission(wrap("adj_matrix.npy", rect),
                                        small_expected(1))) ==
          SubmissionCode::shape_mismatch);

    // Correct shape, float payload.
    const NpyArray floaty = NpyArray::from_doubles({2, 4, 4}, std::vector<double>(32, 0.0));
    CHECK(sole_code(validate_submission(wrap("adj_matrix.npy", floaty),
                                        small_expected(1))) ==
          SubmissionCode::disc_not_binary);

    std::vector<std::int64_t> twos(32, 0);
    twos[7] = 2;
    const NpyArray not_binary = NpyArray::from_int64({2, 4, 4}, twos);
    CHECK(sole_code(validate_submission(wrap("adj_matrix.npy", not_binary),
                                        small_expected(1))) ==
          SubmissionCode::disc_not_binary);

    const NpyArray int_cate = NpyArray::from_int64({2, 3}, std::vector<std::int64_t>(6, 0));
    CHECK(sole_code(validate_submission(wrap("cate_estimate.npy", int_cate),
                                        small_expected(2))) ==
          SubmissionCode::npy_dtype);

    const NpyArray transposed = NpyArray::from_doubles({3, 2}, std::vector<double>(6, 0.0));
    CHECK(sole_code(validate_submission(wrap("cate_estimate.npy", transposed),
                                        small_expected(2))) ==
          SubmissionCode::shape_mismatch);

    std::vector<double> with_nan(6, 0.0);
    with_nan[4] = std::numeric_limits<double>::quiet_NaN();
    CHECK(sole_code(validate_submission(
              wrap("cate_estimate.npy", NpyArray::from_doubles({2, 3}, with_nan)),
              small_expected(2))) == SubmissionCode::cate_nan);

    std::vector<double> with_inf = {0.0, std::numeric_limits<double>::infinity(), 0.0};
    CHECK(sole_code(validate_submission(
              wrap("cate_estimate.npy", NpyArray::from_doubles({3}, with_inf)),
              small_expected(4))) == SubmissionCode::cate_nan);
  }

  SUBCASE("task bounds") {
    ExpectedShape bad = small_expected(1);
    bad.task = 5;
    CHECK_THROWS_AS(validate_submission(wrap("adj_matrix.npy", good), bad),
                    ValidationError);
  }
}

TEST_CASE("submission codes have stable names") {
  CHECK(std::string(submission_code_name(SubmissionCode::zip_parse)) == "ZIP_PARSE");
  CHECK(std::string(submission_code_name(SubmissionCode::zip_empty)) == "ZIP_EMPTY");
  CHECK(std::string(submission_code_name(SubmissionCode::zip_multi_entry)) ==
        "ZIP_MULTI_ENTRY");
  CHECK(std::string(submission_code_name(SubmissionCode::zip_member_name)) ==
        "ZIP_MEMBER_NAME");
  CHECK(std::string(submission_code_name(SubmissionCode::zip_compressed)) ==
        "ZIP_COMPRESSED");
  CHECK(std::string(submission_code_name(SubmissionCode::npy_magic)) == "NPY_MAGIC");
  CHECK(std::string(submission_code_name(SubmissionCode::npy_dtype)) == "NPY_DTYPE");
  CHECK(std::string(submission_code_name(SubmissionCode::npy_fortran)) == "NPY_FORTRAN");
  CHECK(std::string(submission_code_name(SubmissionCode::npy_truncated)) ==
        "NPY_TRUNCATED");
  CHECK(std::string(submission_code_name(SubmissionCode::shape_mismatch)) ==
        "SHAPE_MISMATCH");
  CHECK(std::string(submission_code_name(SubmissionCode::disc_not_binary)) ==
        "DISC_NOT_BINARY");
  CHECK(std::string(submission_code_name(SubmissionCode::cate_nan)) == "CATE_NAN");
}

TEST_CASE("score reports serialize with a fixed key set") {
  ScoreReport report;
  report.task = 2;
  report.per_dataset = {0.01, 0.02};
  report.final_score = 0.015;
  report.redacted = false;
  report.rank = rank_key(0.015, 2, 99);

  const nlohmann::json j = nlohmann::json::parse(report.to_json());
  REQUIRE(j.is_object());
  const std::vector<std::string> keys = {"counts_against_quota", "errors", "final",
                                         "per_dataset", "rank_key", "redacted", "task"};
  REQUIRE(j.size() == keys.size());
  for (const std::string& key : keys) CHECK(j.contains(key));
  CHECK(j["task"] == 2);
  CHECK(j["per_dataset"].size() == 2);
  CHECK(j["final"].get<double>() == doctest::Approx(0.015));
  CHECK(j["redacted"] == false);
  CHECK(j["errors"].empty());
  CHECK(j["rank_key"].get<double>() == doctest::Approx(-0.015));
  CHECK(j["counts_against_quota"] == false);

  ScoreReport redacted;
  redacted.task = 1;
  redacted.redacted = true;
  redacted.rank = rank_key(0.8, 1, 0);
  redacted.errors.push_back({SubmissionCode::cate_nan, "CATE_NAN: example"});
  const nlohmann::json r = nlohmann::json::parse(redacted.to_json());
  CHECK(r["final"].is_null());
  CHECK(r["per_dataset"].empty());
  CHECK(r["redacted"] == true);
  REQUIRE(r["errors"].size() == 1);
  CHECK(r["errors"][0]["code"] == "CATE_NAN");
  CHECK(r["errors"][0]["message"] == "CATE_NAN: example");
}
