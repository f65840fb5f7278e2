#include <doctest.h>

#include <sstream>
#include <string>

#include "cedu/csv.hpp"
#include "cedu/sim.hpp"
#include "cedu/train_csv.hpp"

using namespace cedu;

namespace {

SyntheticDataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_train_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("the documented sample rows parse into trajectories") {
  const std::string text =
      "student_id,bot_action,construct_0,construct_1\n"
      "0,3,0.37,0.56\n"
      "0,2,0.43,0.72\n"
      "25,15,0.38,0.56\n"
      "25,1,0.66,0.94\n";
  // Actions 3 and 15 exceed a 2-construct system; widen virtually by
  // checking the parser only enforces the range against the header width.
  CHECK(error_of(text) != "");  // bot_action 3 out of range for n=2

  // The same rows under 16 constructs are valid.
  std::string header = "student_id,bot_action";
  for (int c = 0; c < 16; ++c) header += ",construct_" + std::to_string(c);
  std::string wide = header + "\n";
  auto pad = [](const std::string& prefix) {
    std::string row = prefix;
    for (int c = 2; c < 16; ++c) row += ",0.5";
    return row + "\n";
  };
  wide += pad("0,3,0.37,0.56");
  wide += pad("0,2,0.43,0.72");
  wide += pad("25,15,0.38,0.56");
  wide += pad("25,1,0.66,0.94");

  const SyntheticDataset dataset = parse(wide);
  CHECK(dataset.num_constructs == 16);
  REQUIRE(dataset.trajectories.size() == 2);
  const Trajectory& first = dataset.trajectories[0];
  CHECK(first.student_id == 0);
  CHECK(first.actions == std::vector<int>{3, 2});
  CHECK(first.probs(0, 0) == 0.37);
  CHECK(first.probs(0, 1) == 0.56);
  CHECK(first.probs(1, 0) == 0.43);
  CHECK(first.probs(1, 1) == 0.72);
  const Trajectory& second = dataset.trajectories[1];
  CHECK(second.student_id == 25);
  CHECK(second.actions == std::vector<int>{15, 1});
  CHECK(second.probs(1, 1) == 0.94);
}

TEST_CASE("write then read is the identity on simulated data") {
  SimConfig config;
  config.num_constructs = 5;
  config.num_students = 4;
  config.num_steps = 20;
  config.edge_probability = 0.25;
  config.feedback_probability = 0.05;
  config.weight_low = 0.2;
  config.weight_high = 0.35;
  config.persistence_low = 0.5;
  config.persistence_high = 0.75;
  config.seed = 21;
  const TemporalGraph graph = generate_graph(config);
  const SyntheticDataset dataset = simulate_dataset(config, graph);

  const std::string text = train_csv_string(dataset);
  const SyntheticDataset back = parse(text);
  REQUIRE(back.trajectories.size() == dataset.trajectories.size());
  for (std::size_t s = 0; s < dataset.trajectories.size(); ++s) {
    CHECK(back.trajectories[s].student_id == dataset.trajectories[s].student_id);
    CHECK(back.trajectories[s].actions == dataset.trajectories[s].actions);
    // Bit-exact value round-trip, not approximate.
    CHECK(back.trajectories[s].probs == dataset.trajectories[s].probs);
  }
  // Encoding the decoded dataset reproduces the bytes.
  CHECK(train_csv_string(back) == text);
}

TEST_CASE("awkward doubles survive the round-trip exactly") {
  SyntheticDataset dataset;
  dataset.num_constructs = 3;
  Trajectory t;
  t.student_id = 0;
  t.actions = {0, 1};
  t.probs = Matrix(2, 3);
  t.probs << 0.1, 1.0 / 3.0, 0.9999999999999999,
      1e-9, 0.49999999999999994, 1.0 - 1e-9;
  dataset.trajectories.push_back(t);
  const SyntheticDataset back = parse(train_csv_string(dataset));
  CHECK(back.trajectories[0].probs == dataset.trajectories[0].probs);
}

TEST_CASE("the exact header is required") {
  CHECK(error_of("").rfind("EMPTY_CSV", 0) == 0);
  CHECK(error_of("student_id,bot_action,construct_0\n").rfind("EMPTY_CSV", 0) == 0);
  CHECK(error_of("student,bot_action,construct_0\n0,0,0.5\n") != "");
  CHECK(error_of("student_id,bot_action,construct_1\n0,0,0.5\n") != "");
  CHECK(error_of("student_id,bot_action\n0,0\n") != "");
}

TEST_CASE("cell-level failures are rejected") {
  const std::string header = "student_id,bot_action,construct_0,construct_1\n";
  CHECK(error_of(header + "0,0,0.5,oops\n") != "");
  CHECK(error_of(header + "0,2,0.5,0.5\n") != "");   // action out of range
  CHECK(error_of(header + "0,-1,0.5,0.5\n") != "");  // negative action
  CHECK(error_of(header + "0,0,1.5,0.5\n") != "");   // probability > 1
  CHECK(error_of(header + "0,0,0.5\n") != "");       // short row
}

TEST_CASE("interleaved student blocks keep first-appearance order") {
  const std::string text =
      "student_id,bot_action,construct_0,construct_1\n"
      "7,0,0.5,0.5\n"
      "3,1,0.25,0.75\n"
      "7,1,0.6,0.4\n";
  const SyntheticDataset dataset = parse(text);
  REQUIRE(dataset.trajectories.size() == 2);
  CHECK(dataset.trajectories[0].student_id == 7);
  CHECK(dataset.trajectories[0].actions == std::vector<int>{0, 1});
  CHECK(dataset.trajectories[1].student_id == 3);
}

TEST_CASE("format_double emits the shortest exact representation") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(parse_double(format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
  CHECK(parse_double(format_double(1e-17), "x") == 1e-17);
}
