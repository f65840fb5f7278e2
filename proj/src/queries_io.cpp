#include "cedu/queries_io.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace cedu {
namespace {

using nlohmann::json;

json missing_padded_row(int value, int width) {
  json row = json::array();
  row.push_back(value);
  for (int i = 1; i < width; ++i) row.push_back(nullptr);
  json outer = json::array();
  outer.push_back(std::move(row));
  return outer;
}

// Missing entries are null canonically; the string "NaN" and a JSON NaN
// literal-equivalent are accepted too.
bool is_missing(const json& v) {
  if (v.is_null()) return true;
  if (v.is_string()) return v.get<std::string>() == "NaN";
  if (v.is_number_float()) return std::isnan(v.get<double>());
  return false;
}

double number_at(const json& v, const std::string& what) {
  if (!v.is_number())
    throw ValidationError("read_queries_json: " + what + " is not a number");
  return v.get<double>();
}

int bot_value(const json& field, const std::string& name, int width) {
  if (!field.is_array() || field.size() != 1 || !field[0].is_array())
    throw ValidationError("read_queries_json: " + name + " must have shape [1, n+1]");
  const json& row = field[0];
  if (static_cast<int>(row.size()) != width)
    throw ValidationError("read_queries_json: " + name + " has wrong width");
  if (is_missing(row[0]))
    throw ValidationError("read_queries_json: " + name + " bot entry is missing");
  const double value = number_at(row[0], name + " bot entry");
  for (std::size_t i = 1; i < row.size(); ++i)
    if (!is_missing(row[i]))
      throw ValidationError("read_queries_json: " + name +
                            " may only set the bot_action entry");
  if (value != std::floor(value))
    throw ValidationError("read_queries_json: " + name + " value must be integral");
  return static_cast<int>(value);
}

}  // namespace

std::string write_queries_json(const std::vector<CateQuery>& queries) {
  json root = json::array();
  for (const CateQuery& q : queries) {
    q.validate();
    const int width = q.num_constructs() + 1;
    json cond = json::array();
    for (int t = 0; t < q.conditioning.rows(); ++t) {
      json row = json::array();
      row.push_back(static_cast<int>(q.conditioning(t, 0)));
      for (int j = 1; j < width; ++j) row.push_back(q.conditioning(t, j));
      cond.push_back(std::move(row));
    }
    json mask = json::array();
    for (int i = 0; i < 3; ++i) {
      json row = json::array();
      for (int j = 0; j < width; ++j)
        row.push_back(i == q.effect_time && j == q.target_construct + 1);
      mask.push_back(std::move(row));
    }
    json obj;
    obj["conditioning"] = std::move(cond);
    obj["intervention"] = missing_padded_row(q.intervention, width);
    obj["reference"] = missing_padded_row(q.reference, width);
    obj["effect_mask"] = std::move(mask);
    root.push_back(std::move(obj));
  }
  return root.dump(2);
}

std::vector<CateQuery> read_queries_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("read_queries_json: invalid JSON: ") + e.what());
  }
  if (!root.is_array())
    throw ValidationError("read_queries_json: top level must be a list");

  static const std::set<std::string> kKeys = {"conditioning", "intervention",
                                              "reference", "effect_mask"};
  std::vector<CateQuery> queries;
  queries.reserve(root.size());
  for (const json& obj : root) {
    if (!obj.is_object())
      throw ValidationError("read_queries_json: query entries must be objects");
    std::set<std::string> keys;
    for (auto it = obj.begin(); it != obj.end(); ++it) keys.insert(it.key());
    if (keys != kKeys)
      throw ValidationError("read_queries_json: wrong key set in query object");

    const json& cond = obj["conditioning"];
    if (!cond.is_array() || cond.empty() || !cond[0].is_array())
      throw ValidationError("read_queries_json: conditioning must be a matrix");
    const int width = static_cast<int>(cond[0].size());
    if (width < 2)
      throw ValidationError("read_queries_json: conditioning must have n+1 >= 2 columns");

    CateQuery q;
    q.conditioning.resize(static_cast<Eigen::Index>(cond.size()), width);
    for (std::size_t t = 0; t < cond.size(); ++t) {
      const json& row = cond[t];
      if (!row.is_array() || static_cast<int>(row.size()) != width)
        throw ValidationError("read_queries_json: ragged conditioning matrix");
      for (int j = 0; j < width; ++j)
        q.conditioning(static_cast<Eigen::Index>(t), j) =
            number_at(row[static_cast<std::size_t>(j)], "conditioning entry");
    }

    q.intervention = bot_value(obj["intervention"], "intervention", width);
    q.reference = bot_value(obj["reference"], "reference", width);

    const json& mask = obj["effect_mask"];
    if (!mask.is_array() || mask.size() != 3)
      throw ValidationError("read_queries_json: effect_mask must have 3 rows");
    int true_row = -1, true_col = -1, true_count = 0;
    for (int i = 0; i < 3; ++i) {
      const json& row = mask[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != width)
        throw ValidationError("read_queries_json: effect_mask has wrong width");
      for (int j = 0; j < width; ++j) {
        const json& v = row[static_cast<std::size_t>(j)];
        if (!v.is_boolean())
          throw ValidationError("read_queries_json: effect_mask entries must be booleans");
        if (v.get<bool>()) {
          ++true_count;
          true_row = i;
          true_col = j;
        }
      }
    }
    if (true_count != 1)
      throw ValidationError(
          "read_queries_json: effect_mask must contain exactly one true entry");
    if (true_col < 1)
      throw ValidationError(
          "read_queries_json: effect_mask must target a construct column");
    q.effect_time = true_row;
    q.target_construct = true_col - 1;
    q.validate();
    queries.push_back(std::move(q));
  }
  return queries;
}

std::string write_query_txt(const std::vector<CateQuery>& queries) {
  std::string out;
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const CateQuery& q = queries[k];
    q.validate();
    out += "CATE number:" + std::to_string(k) + "\n";
    out += "Conditioning_length:" + std::to_string(q.conditioning.rows() - 1) + "\n";
    out += "Bot intervention:" + std::to_string(q.intervention) + "\n";
    out += "Bot reference:" + std::to_string(q.reference) + "\n";
    out += "Effect construct:" + std::to_string(q.target_construct) + "\n";
    out += "Effect time:" + std::to_string(q.effect_time) + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace cedu
