#pragma once
// Codecs for the CATE query files (intervention_*.json / intervention_*.txt).
//
// JSON layout: a list of objects with exactly the keys `conditioning`,
// `intervention`, `reference`, `effect_mask`.
//   - conditioning: [rows][n+1] numbers, column 0 = bot action;
//   - intervention / reference: [1][n+1] with the bot entry set and every
//     other entry missing (written as null; "NaN" accepted on read);
//   - effect_mask: [3][n+1] booleans with exactly one true entry, at row 2
//     and a construct column (the effect-time convention of the tasks).
//
// The companion text rendering lists, per query: `CATE number:<k>`,
// `Conditioning_length:<rows-1>` (time starts at 0), `Bot intervention:`,
// `Bot reference:`, `Effect construct:` and `Effect time:2`.

#include <string>
#include <vector>

#include "cedu/types.hpp"

namespace cedu {

std::string write_queries_json(const std::vector<CateQuery>& queries);
std::vector<CateQuery> read_queries_json(const std::string& text);

std::string write_query_txt(const std::vector<CateQuery>& queries);

}  // namespace cedu
