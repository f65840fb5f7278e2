#pragma once
// Codec for the synthetic training tables (train.csv).
//
// Layout: header `student_id,bot_action,construct_0,...,construct_{n-1}`,
// then one row per step.  Rows sharing a student_id form that student's
// time series in file order.  Probabilities are written in the shortest
// representation that parses back to the identical double.

#include <iosfwd>
#include <string>

#include "cedu/types.hpp"

namespace cedu {

void write_train_csv(std::ostream& out, const SyntheticDataset& dataset);
std::string train_csv_string(const SyntheticDataset& dataset);

// Throws ValidationError on an empty stream (message starts with
// EMPTY_CSV), a malformed header, a non-numeric cell or an out-of-range
// bot_action.
SyntheticDataset read_train_csv(std::istream& in);

}  // namespace cedu
