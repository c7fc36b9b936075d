#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "epsrob/cli.hpp"
#include "epsrob/gadget.hpp"
#include "epsrob/model_io.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace epsrob;
using testing::run;

namespace {

// Threshold model x0 <= 1 on 2 inputs plus a 4-point dataset; point 3 is
// misclassified.
struct Fixture {
  testing::TempDir dir;
  std::string model, inputs, labels;
  Fixture() {
    model = dir.file("m.json");
    save_model_file(threshold_classifier(2, 0, 1.0), model);
    inputs = dir.write("x.csv", "0.5,0\n0.2,0.1\n0.9,0\n1.5,0\n");
    labels = dir.write("y.txt", "0\n0\n0\n0\n");
  }
};

std::vector<std::string> last_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line)) last = line;
  std::vector<std::string> cells;
  std::istringstream row(last);
  for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(5.0) == "5");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("help and version exit zero") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"--version"}).out.find(kToolVersion) != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("decide prints a verdict line and writes the CSV row") {
  Fixture f;
  const auto r = run({"decide", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--index", "0",
                      "--eps", "0.1", "--radius", "0.3", "--out", f.dir.file("d.csv"), "--report",
                      f.dir.file("d.json")});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("SAT successes=", 0) == 0);
  CHECK(r.out.find("stop=early_accept") != std::string::npos);
  const std::string csv = testing::read_file(f.dir.file("d.csv"));
  CHECK(csv.rfind("id,gold,omega,radius,decision,successes,samples,N,c,stop\n0,0,0,0.3,SAT,", 0) == 0);
  const auto report = nlohmann::json::parse(testing::read_file(f.dir.file("d.json")));
  CHECK(report["version"] == kToolVersion);
  CHECK(report["plan"]["N"].get<std::uint64_t>() > 0);
  CHECK(report["records"][0].contains("wall_time_s"));

  const auto unsat = run({"decide", "--model", f.model, "--input", f.dir.write("p.csv", "1,0\n"), "--omega", "0",
                          "--eps", "0.1", "--radius", "0.5"});
  CHECK(unsat.out.rfind("UNSAT", 0) == 0);
}

TEST_CASE("usage errors exit with code 2") {
  Fixture f;
  const std::vector<std::string> base{"--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--eps", "0.1"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), base.begin(), base.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return run(head);
  };
  CHECK(with({"curve"}, {"--radius-grid", "0.5:0.1:0.1"}).code == kExitUsage);
  CHECK(with({"curve"}, {}).code == kExitUsage);
  CHECK(with({"curve"}, {"--radii", "0.1", "--norm", "3"}).code == kExitUsage);
  CHECK(with({"curve"}, {"--radii", "0.1", "--omega", "5"}).code == kExitUsage);
  CHECK(with({"decide"}, {"--index", "0"}).code == kExitUsage);
  CHECK(with({"decide"}, {"--index", "9", "--radius", "1"}).code == kExitUsage);
  CHECK(with({"decide"}, {"--index", "0", "--radius", "1", "--batch", "0"}).code == kExitUsage);
  CHECK(with({"radii"}, {"--precision", "0.1"}).code == kExitUsage);
  CHECK(run({"gadget", f.dir.write("bad.cnf", "p cnf 2 1\n3 0\n"), "--out", f.dir.file("g.json")}).code == kExitUsage);
  CHECK(run({"sample", "--radius", "1"}).code == kExitUsage);
}

TEST_CASE("runtime errors exit with code 3") {
  Fixture f;
  const auto bad = f.dir.write("bad.json", R"({"input_shape": [2], "num_labels": 2, "layers": [{"kind": "nope"}]})");
  const auto r = run({"decide", "--model", bad, "--input", f.dir.write("p.csv", "0,0\n"), "--label", "0", "--eps",
                      "0.1", "--radius", "0.1"});
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("layer 0") != std::string::npos);

  const auto mis = run({"evaluate", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--index", "3",
                        "--eps", "0.1", "--radius-max", "1", "--precision", "0.1"});
  CHECK(mis.code == kExitRuntime);
  CHECK(mis.err.find("fixed") != std::string::npos);
}

TEST_CASE("evaluate with a stub oracle") {
  const auto r = run({"evaluate", "--radius-max", "10", "--precision", "0.01", "--stub-oracle", "5.0"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("r_star=", 0) == 0);
  CHECK(first.find("probes=10") != std::string::npos);
  const double r_star = std::stod(first.substr(7));
  CHECK(std::abs(r_star - 5.0) <= 0.01);
}

TEST_CASE("radii flags misclassified points and summarizes the rest") {
  Fixture f;
  const auto r = run({"radii", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--eps", "0.1",
                      "--radius-max", "4", "--precision", "0.01", "--stub-oracle", "1,2,3,4"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 4 + 2);
  CHECK(lines[4] == "point,3,0,,1,,,,,");
  CHECK(lines[5].rfind("summary,,0,,,3,", 0) == 0);
  CHECK(lines[6].rfind("summary,,all,,,3,", 0) == 0);
}

TEST_CASE("curve counts SAT points per radius") {
  Fixture f;
  const auto r = run({"curve", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--eps", "0.1",
                      "--radii", "0,0.05", "--seed", "3"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out == "radius,sat,points,fraction_sat,nonmonotone\n0,3,4,0.75,0\n0.05,3,4,0.75,0\n");
  const auto correct = run({"curve", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--eps", "0.1",
                            "--radii", "0", "--correct-only"});
  CHECK(correct.out == "radius,sat,points,fraction_sat,nonmonotone\n0,3,3,1,0\n");
}

TEST_CASE("gadget and sample subcommands") {
  testing::TempDir dir;
  const auto cnf = dir.write("f.cnf", "p cnf 3 2\n1 -2 0\n2 3 0\n");
  const auto g = run({"gadget", cnf, "--out", dir.file("g.json")});
  REQUIRE(g.code == kExitOk);
  CHECK(g.out == "variables=3 clauses=2\n");
  CHECK(load_model_file(dir.file("g.json")).num_labels() == 2);
  CHECK(run({"gadget", cnf}).code == kExitUsage);

  const auto a = run({"sample", "--norm", "1", "--radius", "2", "--dim", "3", "--count", "5", "--seed", "4"});
  const auto b = run({"sample", "--norm", "1", "--radius", "2", "--dim", "3", "--count", "5", "--seed", "4"});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("x0,x1,x2\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 6);
  CHECK(run({"sample", "--radius", "1", "--dim", "2", "--count", "0"}).out == "x0,x1\n");
}

TEST_CASE("curve on a constant-correct model and the monotonicity flag") {
  testing::TempDir dir;
  // Logits (1, 0) everywhere: label 0 at every input.
  save_model_file(NetworkModel({2}, 2, {DenseLayer{2, 2, {0, 0, 0, 0}, {1, 0}}}), dir.file("c.json"));
  dir.write("x.csv", "0,0\n5,5\n");
  dir.write("y.txt", "0\n0\n");
  const auto r = run({"curve", "--model", dir.file("c.json"), "--dataset", dir.file("x.csv"), "--labels",
                      dir.file("y.txt"), "--eps", "0.01", "--radius-grid", "0:1:0.5"});
  CHECK(r.out == "radius,sat,points,fraction_sat,nonmonotone\n0,2,2,1,0\n0.5,2,2,1,0\n1,2,2,1,0\n");

  // Threshold model: the point at 0.9 is SAT at 0 and 0.05, UNSAT at 2, so
  // listing radii out of order must not raise the flag.
  Fixture f;
  const auto g = run({"curve", "--model", f.model, "--dataset", f.inputs, "--labels", f.labels, "--eps", "0.1",
                      "--radii", "2,0,0.05"});
  CHECK(g.out.find(",1\n") == std::string::npos);
}

TEST_CASE("radii summary uses the population standard deviation") {
  testing::TempDir dir;
  save_model_file(threshold_classifier(1, 0, 1.0), dir.file("t.json"));
  dir.write("x.csv", "0\n0\n");
  dir.write("y.txt", "0\n0\n");
  const auto r = run({"radii", "--model", dir.file("t.json"), "--dataset", dir.file("x.csv"), "--labels",
                      dir.file("y.txt"), "--radius-max", "16", "--precision", "0.0001", "--stub-oracle", "3,7"});
  REQUIRE(r.code == kExitOk);
  const auto fields = last_row(r.out);
  REQUIRE(fields.size() == 10);
  CHECK(fields[5] == "2");
  CHECK(std::stod(fields[6]) == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(std::stod(fields[7]) == doctest::Approx(2.0).epsilon(1e-4));

  const auto single = run({"radii", "--model", dir.file("t.json"), "--dataset", dir.file("x.csv"), "--labels",
                           dir.file("y.txt"), "--radius-max", "16", "--precision", "0.01", "--stub-oracle", "3"});
  CHECK(last_row(single.out).at(7) == "0");
}

TEST_CASE("l2 sample mass inside a quarter radius") {
  const auto r = run({"sample", "--norm", "2", "--radius", "1", "--dim", "2", "--count", "100000", "--seed", "8"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int inside = 0, total = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma)), y = std::stod(line.substr(comma + 1));
    inside += x * x + y * y <= 1.0 / 16.0;
    ++total;
  }
  CHECK(total == 100000);
  // 1/16 with a 4-sigma binomial allowance.
  CHECK(std::abs(inside / 100000.0 - 1.0 / 16.0) < 4.0 * std::sqrt(0.0625 * 0.9375 / 100000.0));
}
