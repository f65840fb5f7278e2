#include <doctest.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "cedu/queries_io.hpp"

using namespace cedu;

namespace {

CateQuery sample_query(int n, int rows) {
  CateQuery q;
  q.conditioning = Matrix::Constant(rows, n + 1, 0.5);
  for (int r = 0; r < rows; ++r) q.conditioning(r, 0) = r % n;
  q.intervention = 1;
  q.reference = 0;
  q.target_construct = 2;
  q.effect_time = 2;
  return q;
}

}  // namespace

TEST_CASE("the documented intervention encoding decodes to c_I = 25") {
  const int n = 50;
  nlohmann::json query;
  nlohmann::json cond_row = nlohmann::json::array();
  cond_row.push_back(3);
  for (int c = 0; c < n; ++c) cond_row.push_back(0.5);
  query["conditioning"] = nlohmann::json::array({cond_row, cond_row, cond_row});

  nlohmann::json intervention_row = nlohmann::json::array();
  intervention_row.push_back(25);
  for (int c = 0; c < n; ++c) intervention_row.push_back(nullptr);
  query["intervention"] = nlohmann::json::array({intervention_row});

  nlohmann::json reference_row = intervention_row;
  reference_row[0] = 7;
  query["reference"] = nlohmann::json::array({reference_row});

  // effect_mask true at [2][j] means construct j-1 two steps ahead.
  nlohmann::json mask = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < n + 1; ++c) row.push_back(r == 2 && c == 4);
    mask.push_back(row);
  }
  query["effect_mask"] = mask;

  const std::vector<CateQuery> queries =
      read_queries_json(nlohmann::json::array({query}).dump());
  REQUIRE(queries.size() == 1);
  CHECK(queries[0].intervention == 25);
  CHECK(queries[0].reference == 7);
  CHECK(queries[0].target_construct == 3);  // column 4 -> construct 3
  CHECK(queries[0].effect_time == 2);
  CHECK(queries[0].conditioning.rows() == 3);
  CHECK(queries[0].conditioning.cols() == 51);
}

TEST_CASE("write then read is the identity") {
  std::vector<CateQuery> queries{sample_query(4, 6), sample_query(4, 3)};
  queries[1].intervention = 3;
  queries[1].target_construct = 0;
  const std::vector<CateQuery> back = read_queries_json(write_queries_json(queries));
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].conditioning == queries[k].conditioning);
    CHECK(back[k].intervention == queries[k].intervention);
    CHECK(back[k].reference == queries[k].reference);
    CHECK(back[k].target_construct == queries[k].target_construct);
    CHECK(back[k].effect_time == queries[k].effect_time);
  }
}

TEST_CASE("missing values are written as null and accepted as the string NaN") {
  const std::string text = write_queries_json({sample_query(3, 4)});
  const nlohmann::json parsed = nlohmann::json::parse(text);
  CHECK(parsed[0]["intervention"][0][1].is_null());

  // Swap null for the informal "NaN" spelling; both decode identically.
  nlohmann::json relaxed = parsed;
  for (int c = 1; c < 4; ++c) {
    relaxed[0]["intervention"][0][c] = "NaN";
    relaxed[0]["reference"][0][c] = "NaN";
  }
  const std::vector<CateQuery> a = read_queries_json(text);
  const std::vector<CateQuery> b = read_queries_json(relaxed.dump());
  CHECK(a[0].intervention == b[0].intervention);
  CHECK(a[0].reference == b[0].reference);
}

TEST_CASE("strict key set and mask rules") {
  const std::string good = write_queries_json({sample_query(3, 4)});
  nlohmann::json j = nlohmann::json::parse(good);

  nlohmann::json extra = j;
  extra[0]["surprise"] = 1;
  CHECK_THROWS_AS(read_queries_json(extra.dump()), ValidationError);

  nlohmann::json missing_key = j;
  missing_key[0].erase("reference");
  CHECK_THROWS_AS(read_queries_json(missing_key.dump()), ValidationError);

  nlohmann::json two_true = j;
  two_true[0]["effect_mask"][2][1] = true;
  two_true[0]["effect_mask"][2][2] = true;
  CHECK_THROWS_AS(read_queries_json(two_true.dump()), ValidationError);

  nlohmann::json no_true = j;
  for (auto& row : no_true[0]["effect_mask"])
    for (auto& cell : row) cell = false;
  CHECK_THROWS_AS(read_queries_json(no_true.dump()), ValidationError);

  nlohmann::json bot_column = j;
  for (auto& row : bot_column[0]["effect_mask"])
    for (auto& cell : row) cell = false;
  bot_column[0]["effect_mask"][2][0] = true;  // targets the bot variable
  CHECK_THROWS_AS(read_queries_json(bot_column.dump()), ValidationError);

  nlohmann::json bot_missing = j;
  bot_missing[0]["intervention"][0][0] = nullptr;
  CHECK_THROWS_AS(read_queries_json(bot_missing.dump()), ValidationError);

  nlohmann::json value_set = j;
  value_set[0]["intervention"][0][2] = 0.5;  // non-bot entry must be missing
  CHECK_THROWS_AS(read_queries_json(value_set.dump()), ValidationError);

  nlohmann::json ragged = j;
  ragged[0]["conditioning"][1].erase(2);
  CHECK_THROWS_AS(read_queries_json(ragged.dump()), ValidationError);

  CHECK_THROWS_AS(read_queries_json("{\"not\": \"a list\"}"), ValidationError);
  CHECK_THROWS_AS(read_queries_json("not json"), ValidationError);
}

TEST_CASE("the text rendering follows the documented block format") {
  // 141 conditioning rows must print Conditioning_length:140, because
  // the starting time is 0.
  std::vector<CateQuery> queries{sample_query(3, 141), sample_query(3, 5)};
  queries[0].intervention = 2;
  queries[0].reference = 1;
  queries[0].target_construct = 0;
  const std::string text = write_query_txt(queries);

  CHECK(text.find("CATE number:0\n") != std::string::npos);
  CHECK(text.find("CATE number:1\n") != std::string::npos);
  CHECK(text.find("Conditioning_length:140\n") != std::string::npos);
  CHECK(text.find("Conditioning_length:4\n") != std::string::npos);
  CHECK(text.find("Bot intervention:2\n") != std::string::npos);
  CHECK(text.find("Bot reference:1\n") != std::string::npos);
  CHECK(text.find("Effect construct:0\n") != std::string::npos);
  CHECK(text.find("Effect time:2\n") != std::string::npos);
}

TEST_CASE("ten queries render as ten blocks") {
  std::vector<CateQuery> queries(10, sample_query(3, 4));
  const std::string text = write_query_txt(queries);
  std::size_t blocks = 0, pos = 0;
  while ((pos = text.find("CATE number:", pos)) != std::string::npos) {
    ++blocks;
    ++pos;
  }
  CHECK(blocks == 10);
  CHECK(text.find("CATE number:9\n") != std::string::npos);
}
