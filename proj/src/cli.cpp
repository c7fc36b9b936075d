#include "epsrob/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "epsrob/ball_sampler.hpp"
#include "epsrob/dataset.hpp"
#include "epsrob/dimacs.hpp"
#include "epsrob/error.hpp"
#include "epsrob/gadget.hpp"
#include "epsrob/model_io.hpp"
#include "epsrob/robustness.hpp"

namespace epsrob {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model_path;
  std::string dataset_path;
  std::string labels_path;
  std::string shape_text;
  std::string input_path;
  std::string omega_text;
  std::optional<std::size_t> index;
  std::optional<std::size_t> label;

  std::optional<double> eps;
  std::optional<double> eps_prime;
  double alpha = 0.001;
  double beta = 0.001;
  std::string sigma = "printed";

  std::string norm = "inf";
  std::optional<double> radius;
  std::optional<double> radius_max;
  std::optional<double> precision;
  std::string radius_grid;
  std::string radii_list;
  std::string clamp_text;
  std::string l2_law = "gamma";

  std::uint64_t seed = 0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t batch = 256;
  bool correct_only = false;

  std::string out_path;
  std::string report_path;

  std::string stub_oracle;
  std::string dimacs_path;
  std::string center_path;
  std::optional<std::size_t> dim;
  std::size_t count = 0;
};

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) {
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    parts.push_back(part);
  }
  return parts;
}

double to_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [end, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
    throw UsageError("invalid number '" + text + "' for " + what);
  return value;
}

std::size_t to_index(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size())
    throw UsageError("invalid non-negative integer '" + text + "' for " + what);
  return value;
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  for (const auto& part : split(text, ',')) {
    const std::size_t d = to_index(part, "--shape");
    if (d == 0) throw UsageError("--shape dimensions must be positive");
    shape.push_back(d);
  }
  if (shape.empty()) throw UsageError("--shape is empty");
  return shape;
}

LabelSet parse_omega(const std::string& text) {
  std::vector<std::size_t> labels;
  for (const auto& part : split(text, ',')) labels.push_back(to_index(part, "--omega"));
  if (labels.empty()) throw UsageError("--omega is empty");
  return LabelSet(std::move(labels));
}

std::optional<ClampRange> parse_clamp(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--clamp expects lo,hi");
  ClampRange range{to_double(parts[0], "--clamp"), to_double(parts[1], "--clamp")};
  if (range.lo > range.hi) throw UsageError("--clamp needs lo <= hi");
  return range;
}

L2RadiusLaw parse_l2_law(const std::string& text) {
  if (text == "gamma") return L2RadiusLaw::kIncompleteGamma;
  if (text == "uniform") return L2RadiusLaw::kUniformPower;
  throw UsageError("--l2-radius-law must be 'gamma' or 'uniform'");
}

Norm norm_arg(const Options& o) {
  try {
    return parse_norm(o.norm);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> radius_grid(const Options& o) {
  std::vector<double> radii;
  if (!o.radius_grid.empty()) {
    const auto parts = split(o.radius_grid, ':');
    if (parts.size() != 3) throw UsageError("--radius-grid expects min:max:step");
    const double lo = to_double(parts[0], "--radius-grid");
    const double hi = to_double(parts[1], "--radius-grid");
    const double step = to_double(parts[2], "--radius-grid");
    if (lo < 0.0 || step <= 0.0) throw UsageError("--radius-grid needs min >= 0 and step > 0");
    for (std::size_t k = 0;; ++k) {
      const double r = lo + static_cast<double>(k) * step;
      if (r > hi + 1e-9 * step) break;
      radii.push_back(r);
    }
  }
  if (!o.radii_list.empty())
    for (const auto& part : split(o.radii_list, ',')) {
      const double r = to_double(part, "--radii");
      if (r < 0.0) throw UsageError("radii must be non-negative");
      radii.push_back(r);
    }
  if (radii.empty()) throw UsageError("radius grid is empty");
  return radii;
}

// ---------------------------------------------------------------- inputs

struct Point {
  std::size_t id = 0;
  std::optional<std::size_t> gold;
  std::vector<double> center;
};

NetworkModel require_model(const Options& o) {
  if (o.model_path.empty()) throw UsageError("--model is required");
  return load_model_file(o.model_path);
}

Shape point_shape(const Options& o, const NetworkModel& model) {
  if (o.shape_text.empty()) return model.input_shape();
  Shape shape = parse_shape(o.shape_text);
  if (shape_size(shape) != model.input_size())
    throw ShapeError("--shape " + shape_to_string(shape) + " does not match model input " +
                     shape_to_string(model.input_shape()));
  return shape;
}

DatasetSlice require_dataset(const Options& o, const NetworkModel& model) {
  if (o.dataset_path.empty() || o.labels_path.empty()) throw UsageError("--dataset and --labels are required");
  DatasetSlice data = load_dataset(o.dataset_path, o.labels_path, point_shape(o, model));
  for (std::size_t label : data.labels)
    if (label >= model.num_labels())
      throw std::invalid_argument("dataset label " + std::to_string(label) + " out of range for the model");
  return data;
}

std::vector<double> flat(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

Point single_point(const Options& o, const NetworkModel& model) {
  if (!o.input_path.empty()) {
    if (!o.dataset_path.empty()) throw UsageError("use either --input or --dataset, not both");
    return Point{0, o.label, flat(load_input_file(o.input_path, point_shape(o, model)))};
  }
  if (o.dataset_path.empty()) throw UsageError("one of --input or --dataset/--labels/--index is required");
  if (!o.index) throw UsageError("--index is required with --dataset");
  const DatasetSlice data = require_dataset(o, model);
  if (*o.index >= data.size()) throw UsageError("--index beyond dataset size");
  return Point{data.ids[*o.index], data.labels[*o.index], flat(data.inputs[*o.index])};
}

std::size_t predicted_label(const NetworkModel& model, const std::vector<double>& center) {
  Shape shape{1};
  shape.insert(shape.end(), model.input_shape().begin(), model.input_shape().end());
  return predict(model, Tensor(std::move(shape), center)).front();
}

/// --omega if given, else the gold label, else the model's own prediction.
LabelSet omega_for(const Options& o, const NetworkModel& model, const Point& p) {
  LabelSet omega = !o.omega_text.empty() ? parse_omega(o.omega_text)
                   : p.gold                ? LabelSet{*p.gold}
                                           : LabelSet{predicted_label(model, p.center)};
  try {
    omega.validate(model.num_labels());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--omega: ") + e.what());
  }
  return omega;
}

double require_eps(const Options& o) {
  if (!o.eps) throw UsageError("--eps is required");
  return *o.eps;
}

RobustnessQuery base_query(const Options& o, std::vector<double> center, LabelSet omega) {
  RobustnessQuery q;
  q.center = std::move(center);
  q.norm = norm_arg(o);
  q.epsilon = require_eps(o);
  q.epsilon_prime = o.eps_prime;
  q.omega = std::move(omega);
  q.budget = ErrorBudget{o.alpha, o.beta};
  q.sigma = parse_sigma_convention(o.sigma);
  q.seed = o.seed;
  q.batch_size = o.batch;
  q.sampler.clamp = parse_clamp(o.clamp_text);
  q.sampler.l2_radius_law = parse_l2_law(o.l2_law);
  return q;
}

TestPlan plan_for(const Options& o) {
  try {
    return plan_test(require_eps(o), ErrorBudget{o.alpha, o.beta}, o.eps_prime, parse_sigma_convention(o.sigma));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------- outputs

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string omega_field(const LabelSet& omega) {
  std::string s;
  for (std::size_t i = 0; i < omega.labels().size(); ++i) {
    if (i) s += ';';
    s += std::to_string(omega.labels()[i]);
  }
  return s;
}

json plan_json(const TestPlan& plan) {
  return json{{"epsilon", plan.epsilon},
              {"epsilon_prime", plan.epsilon_prime},
              {"alpha", plan.budget.alpha},
              {"beta", plan.budget.beta},
              {"z_alpha", plan.z_alpha},
              {"z_one_minus_beta", plan.z_one_minus_beta},
              {"N", plan.sample_size},
              {"c", plan.threshold},
              {"sigma_convention", sigma_convention_name(plan.sigma)}};
}

json verdict_json(const Verdict& v) {
  return json{{"decision", decision_name(v.decision)},
              {"successes", v.successes},
              {"samples", v.samples_drawn},
              {"stop", stop_reason_name(v.stop_reason)}};
}

json run_metadata(const Options& o, const std::string& command) {
  json meta{{"tool", "epsrob"},  {"version", kToolVersion}, {"command", command},
            {"seed", o.seed},    {"norm", o.norm},          {"workers", o.workers},
            {"batch", o.batch},  {"l2_radius_law", o.l2_law}};
  if (o.eps) meta["plan"] = plan_json(plan_for(o));
  if (const auto clamp = parse_clamp(o.clamp_text)) {
    meta["clamp"] = {clamp->lo, clamp->hi};
    meta["clamped_measure"] = "clamping changes the sampled measure; results fall outside the uniform-ball definition";
  } else {
    meta["clamp"] = nullptr;
  }
  return meta;
}

void write_report(const Options& o, json meta, json records) {
  if (o.report_path.empty()) return;
  meta["records"] = std::move(records);
  std::ofstream file(o.report_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + o.report_path);
  file << meta.dump(2) << '\n';
}

void warn_clamp(const Options& o, std::ostream& err) {
  if (!o.clamp_text.empty())
    err << "note: --clamp is set; clipped samples are not uniform on the ball\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
void in_arena(const Options& o, F&& body) {
  if (o.workers == 0) throw UsageError("--workers must be >= 1");
  // Lift TBB's default cap (the core count) so --workers is honored as given.
  tbb::global_control limit(tbb::global_control::max_allowed_parallelism, o.workers);
  tbb::task_arena arena(static_cast<int>(o.workers));
  arena.execute(std::forward<F>(body));
}

// ---------------------------------------------------------------- stub oracle

/// Hidden test mode: "sat", "unsat", or radii r_true (one per point or one
/// for all) with SAT iff radius <= r_true.
std::vector<RadiusOracle> stub_oracles(const std::string& text, const TestPlan& plan, std::size_t points) {
  auto fixed = [plan](Decision d) {
    return RadiusOracle([plan, d](double, std::uint64_t) {
      return Verdict{d, 0, 0, plan, d == Decision::kSat ? StopReason::kEarlyAccept : StopReason::kEarlyReject};
    });
  };
  if (text == "sat") return std::vector<RadiusOracle>(points, fixed(Decision::kSat));
  if (text == "unsat") return std::vector<RadiusOracle>(points, fixed(Decision::kUnsat));
  std::vector<double> truths;
  for (const auto& part : split(text, ',')) truths.push_back(to_double(part, "--stub-oracle"));
  if (truths.size() == 1) truths.resize(points, truths.front());
  if (truths.size() != points) throw UsageError("--stub-oracle needs one radius or one per point");
  std::vector<RadiusOracle> oracles;
  for (double truth : truths)
    oracles.push_back([plan, truth](double radius, std::uint64_t) {
      const bool sat = radius <= truth;
      return Verdict{sat ? Decision::kSat : Decision::kUnsat, 0, 0, plan,
                     sat ? StopReason::kEarlyAccept : StopReason::kEarlyReject};
    });
  return oracles;
}

// ---------------------------------------------------------------- commands

int cmd_decide(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.radius) throw UsageError("--radius is required");
  const NetworkModel model = require_model(o);
  const Point point = single_point(o, model);
  RobustnessQuery query = base_query(o, point.center, omega_for(o, model, point));
  query.radius = *o.radius;
  if (query.radius < 0.0) throw UsageError("--radius must be >= 0");
  warn_clamp(o, err);

  const auto start = std::chrono::steady_clock::now();
  Verdict verdict;
  in_arena(o, [&] { verdict = decide(model, query); });
  const double wall = seconds_since(start);

  out << decision_name(verdict.decision) << " successes=" << verdict.successes
      << " samples=" << verdict.samples_drawn << " N=" << verdict.plan.sample_size
      << " c=" << format_number(verdict.plan.threshold) << " eps_prime=" << format_number(verdict.plan.epsilon_prime)
      << " stop=" << stop_reason_name(verdict.stop_reason) << '\n';

  if (!o.out_path.empty()) {
    Sink sink(o.out_path, out);
    sink.get() << "id,gold,omega,radius,decision,successes,samples,N,c,stop\n"
               << point.id << ',' << (point.gold ? std::to_string(*point.gold) : "") << ','
               << omega_field(query.omega) << ',' << format_number(query.radius) << ','
               << decision_name(verdict.decision) << ',' << verdict.successes << ',' << verdict.samples_drawn << ','
               << verdict.plan.sample_size << ',' << format_number(verdict.plan.threshold) << ','
               << stop_reason_name(verdict.stop_reason) << '\n';
  }
  json record = verdict_json(verdict);
  record["id"] = point.id;
  record["gold"] = point.gold ? json(*point.gold) : json(nullptr);
  record["omega"] = query.omega.labels();
  record["radius"] = query.radius;
  record["wall_time_s"] = wall;
  write_report(o, run_metadata(o, "decide"), json::array({record}));
  return kExitOk;
}

void print_trace(std::ostream& out, const RadiusResult& result) {
  out << "r_star=" << format_number(result.r_star) << " probes=" << result.probes.size() << '\n';
  for (std::size_t k = 0; k < result.probes.size(); ++k) {
    const auto& p = result.probes[k];
    out << "probe " << k << " radius=" << format_number(p.radius) << ' ' << decision_name(p.verdict.decision)
        << " samples=" << p.verdict.samples_drawn << '\n';
  }
}

json result_json(const RadiusResult& result) {
  json probes = json::array();
  for (const auto& p : result.probes) {
    json probe = verdict_json(p.verdict);
    probe["radius"] = p.radius;
    probes.push_back(probe);
  }
  return json{{"r_star", result.r_star}, {"precision", result.precision}, {"R", result.upper_bound}, {"probes", probes}};
}

void check_bisection_args(const Options& o) {
  if (!o.radius_max || !o.precision) throw UsageError("--radius-max and --precision are required");
  if (!(*o.radius_max > 0.0) || !(*o.precision > 0.0)) throw UsageError("--radius-max and --precision must be > 0");
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  check_bisection_args(o);
  warn_clamp(o, err);
  RadiusResult result;
  json record;
  const auto start = std::chrono::steady_clock::now();
  if (!o.stub_oracle.empty()) {
    const TestPlan plan = o.eps ? plan_for(o) : plan_test(0.01, ErrorBudget{});
    result = bisect_radius(stub_oracles(o.stub_oracle, plan, 1).front(), *o.radius_max, *o.precision);
  } else {
    const NetworkModel model = require_model(o);
    const Point point = single_point(o, model);
    const RobustnessQuery query = base_query(o, point.center, omega_for(o, model, point));
    in_arena(o, [&] { result = evaluate(model, query, *o.radius_max, *o.precision); });
    record["id"] = point.id;
    record["gold"] = point.gold ? json(*point.gold) : json(nullptr);
    record["omega"] = query.omega.labels();
  }
  print_trace(out, result);
  record.update(result_json(result));
  record["wall_time_s"] = seconds_since(start);
  if (!o.out_path.empty()) {
    Sink sink(o.out_path, out);
    std::uint64_t samples = 0;
    for (const auto& p : result.probes) samples += p.verdict.samples_drawn;
    sink.get() << "r_star,probes,samples\n"
               << format_number(result.r_star) << ',' << result.probes.size() << ',' << samples << '\n';
  }
  write_report(o, run_metadata(o, "evaluate"), json::array({record}));
  return kExitOk;
}

int cmd_curve(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<double> radii = radius_grid(o);
  const NetworkModel model = require_model(o);
  const DatasetSlice data = require_dataset(o, model);
  warn_clamp(o, err);

  std::vector<Point> points;
  for (std::size_t i = 0; i < data.size(); ++i) points.push_back(Point{data.ids[i], data.labels[i], flat(data.inputs[i])});

  std::vector<std::uint8_t> included(points.size(), 1);
  std::vector<std::vector<Verdict>> verdicts(points.size(), std::vector<Verdict>(radii.size()));
  std::vector<double> wall(points.size(), 0.0);
  std::vector<LabelSet> omegas;
  for (const auto& p : points) omegas.push_back(omega_for(o, model, p));
  const RobustnessQuery prototype = base_query(o, {}, LabelSet{});

  in_arena(o, [&] {
    tbb::parallel_for(std::size_t{0}, points.size(), [&](std::size_t i) {
      const auto start = std::chrono::steady_clock::now();
      if (o.correct_only && predicted_label(model, points[i].center) != *points[i].gold) {
        included[i] = 0;
        return;
      }
      RobustnessQuery query = prototype;
      query.center = points[i].center;
      query.omega = omegas[i];
      for (std::size_t k = 0; k < radii.size(); ++k) {
        query.radius = radii[k];
        query.seed = derive_seed(derive_seed(o.seed, k), points[i].id);
        verdicts[i][k] = decide(model, query);
      }
      wall[i] = seconds_since(start);
    });
  });

  const std::size_t denominator = static_cast<std::size_t>(std::count(included.begin(), included.end(), 1));
  std::vector<std::size_t> sat(radii.size(), 0);
  for (std::size_t k = 0; k < radii.size(); ++k)
    for (std::size_t i = 0; i < points.size(); ++i)
      if (included[i] && verdicts[i][k].decision == Decision::kSat) ++sat[k];

  // A row is flagged when some smaller radius has fewer SAT points.
  Sink sink(o.out_path, out);
  sink.get() << "radius,sat,points,fraction_sat,nonmonotone\n";
  for (std::size_t k = 0; k < radii.size(); ++k) {
    bool flagged = false;
    for (std::size_t j = 0; j < radii.size(); ++j) flagged = flagged || (radii[j] < radii[k] && sat[j] < sat[k]);
    const double fraction = denominator ? static_cast<double>(sat[k]) / static_cast<double>(denominator) : 0.0;
    sink.get() << format_number(radii[k]) << ',' << sat[k] << ',' << denominator << ',' << format_number(fraction)
               << ',' << (flagged ? 1 : 0) << '\n';
  }

  json records = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    json record{{"id", points[i].id}, {"gold", *points[i].gold}, {"omega", omegas[i].labels()},
                {"included", included[i] == 1}, {"wall_time_s", wall[i]}};
    json per_radius = json::array();
    if (included[i])
      for (std::size_t k = 0; k < radii.size(); ++k) {
        json v = verdict_json(verdicts[i][k]);
        v["radius"] = radii[k];
        per_radius.push_back(v);
      }
    record["verdicts"] = per_radius;
    records.push_back(record);
  }
  json meta = run_metadata(o, "curve");
  meta["correct_only"] = o.correct_only;
  write_report(o, meta, records);
  return kExitOk;
}

int cmd_radii(const Options& o, std::ostream& out, std::ostream& err) {
  check_bisection_args(o);
  const NetworkModel model = require_model(o);
  const DatasetSlice data = require_dataset(o, model);
  warn_clamp(o, err);

  std::vector<Point> points;
  for (std::size_t i = 0; i < data.size(); ++i) points.push_back(Point{data.ids[i], data.labels[i], flat(data.inputs[i])});
  std::vector<LabelSet> omegas;
  for (const auto& p : points) omegas.push_back(omega_for(o, model, p));

  std::vector<RadiusOracle> stubs;
  if (!o.stub_oracle.empty())
    stubs = stub_oracles(o.stub_oracle, o.eps ? plan_for(o) : plan_test(0.01, ErrorBudget{}), points.size());
  const RobustnessQuery prototype = stubs.empty() ? base_query(o, {}, LabelSet{}) : RobustnessQuery{};

  std::vector<std::optional<RadiusResult>> results(points.size());
  std::vector<double> wall(points.size(), 0.0);
  in_arena(o, [&] {
    tbb::parallel_for(std::size_t{0}, points.size(), [&](std::size_t i) {
      const auto start = std::chrono::steady_clock::now();
      if (!point_check(model, points[i].center, omegas[i])) return;
      if (!stubs.empty()) {
        results[i] = bisect_radius(stubs[i], *o.radius_max, *o.precision);
      } else {
        RobustnessQuery query = prototype;
        query.center = points[i].center;
        query.omega = omegas[i];
        query.seed = derive_seed(o.seed, points[i].id);
        results[i] = evaluate(model, query, *o.radius_max, *o.precision);
      }
      wall[i] = seconds_since(start);
    });
  });

  Sink sink(o.out_path, out);
  auto& csv = sink.get();
  csv << "record,id,label,r_star,misclassified,count,mean,std_pop,mean_minus_2std,mean_plus_2std\n";
  std::map<std::size_t, std::vector<double>> by_class;
  std::vector<double> all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv << "point," << points[i].id << ',' << *points[i].gold << ',';
    if (results[i]) {
      csv << format_number(results[i]->r_star) << ",0";
      by_class[*points[i].gold].push_back(results[i]->r_star);
      all.push_back(results[i]->r_star);
    } else {
      csv << ",1";
    }
    csv << ",,,,,\n";
  }
  auto summary = [&](const std::string& label, const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    csv << "summary,," << label << ",,," << values.size() << ',' << format_number(mean) << ',' << format_number(sd)
        << ',' << format_number(mean - 2 * sd) << ',' << format_number(mean + 2 * sd) << '\n';
  };
  for (const auto& [label, values] : by_class) summary(std::to_string(label), values);
  if (!all.empty()) summary("all", all);

  json records = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    json record{{"id", points[i].id}, {"gold", *points[i].gold}, {"omega", omegas[i].labels()},
                {"misclassified", !results[i].has_value()}, {"wall_time_s", wall[i]}};
    if (results[i]) record.update(result_json(*results[i]));
    records.push_back(record);
  }
  write_report(o, run_metadata(o, "radii"), records);
  return kExitOk;
}

int cmd_gadget(const Options& o, std::ostream& out, std::ostream&) {
  if (o.out_path.empty()) throw UsageError("--out is required");
  CnfFormula cnf;
  try {
    cnf = load_dimacs_file(o.dimacs_path);
  } catch (const ParseError& e) {
    throw UsageError(std::string("DIMACS: ") + e.what());
  }
  const GadgetNetwork gadget = build_gadget(cnf);
  save_model_file(gadget.model, o.out_path);
  out << "variables=" << cnf.num_variables << " clauses=" << gadget.clause_count << '\n';
  return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.radius) throw UsageError("--radius is required");
  BallSpec spec;
  spec.norm = norm_arg(o);
  spec.radius = *o.radius;
  if (!o.center_path.empty()) {
    const auto rows = parse_numeric_rows([&] {
      std::ifstream in(o.center_path);
      if (!in) throw std::runtime_error("cannot open " + o.center_path);
      return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }());
    if (rows.size() != 1) throw std::runtime_error("--center file must hold one numeric row");
    spec.center = rows.front();
  } else if (o.dim) {
    spec.center.assign(*o.dim, 0.0);
  } else {
    throw UsageError("one of --center or --dim is required");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  SamplerOptions options;
  options.clamp = parse_clamp(o.clamp_text);
  options.l2_radius_law = parse_l2_law(o.l2_law);
  warn_clamp(o, err);

  Sink sink(o.out_path, out);
  auto& csv = sink.get();
  for (std::size_t j = 0; j < spec.dimension(); ++j) csv << (j ? "," : "") << 'x' << j;
  csv << '\n';
  const SampleStream stream{o.seed};
  std::vector<double> row(spec.dimension());
  for (std::size_t i = 0; i < o.count; ++i) {
    sample_into(spec, stream, i, row, options);
    for (std::size_t j = 0; j < row.size(); ++j) csv << (j ? "," : "") << format_number(row[j]);
    csv << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_model_inputs(CLI::App& cmd, Options& o, bool single) {
  cmd.add_option("--model", o.model_path, "Model file (JSON)");
  cmd.add_option("--dataset", o.dataset_path, "Inputs CSV, one flattened tensor per row");
  cmd.add_option("--labels", o.labels_path, "Gold labels, one integer per line");
  cmd.add_option("--shape", o.shape_text, "Per-point tensor shape d1,d2,... (default: model input shape)");
  cmd.add_option("--omega", o.omega_text, "Acceptable labels i,j,... (default: gold label)");
  if (single) {
    cmd.add_option("--input", o.input_path, "Single input file (one numeric row)");
    cmd.add_option("--index", o.index, "Row of --dataset to analyze");
    cmd.add_option("--label", o.label, "Gold label for --input");
  }
}

void add_statistics(CLI::App& cmd, Options& o) {
  cmd.add_option("--eps", o.eps, "Tolerated fraction of non-Omega predictions, in (0,1)");
  cmd.add_option("--eps-prime", o.eps_prime, "Relaxed boundary in (0, eps); default eps - min(eps(1-eps), 0.005)");
  cmd.add_option("--alpha", o.alpha, "Type-I error bound")->capture_default_str();
  cmd.add_option("--beta", o.beta, "Type-II error bound")->capture_default_str();
  cmd.add_option("--sigma", o.sigma, "Dispersion term: printed (p(1-p)) or std (sqrt(p(1-p)))")->capture_default_str();
  cmd.add_option("--norm", o.norm, "Ball norm: 1, 2 or inf")->capture_default_str();
  cmd.add_option("--clamp", o.clamp_text, "Clip samples into lo,hi (changes the sampled measure)");
  cmd.add_option("--l2-radius-law", o.l2_law, "l2 radial scale: gamma or uniform")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd.add_option("--workers", o.workers, "Worker threads")->capture_default_str();
  cmd.add_option("--batch", o.batch, "Samples per early-stop check")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out_path, "CSV output path");
  cmd.add_option("--report", o.report_path, "JSON run report path");
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buffer, end);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"epsrob: statistical epsilon-weakened robustness analysis of feed-forward classifiers", "epsrob"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* decide_cmd = app.add_subcommand("decide", "Decide epsilon-weakened robustness at one radius");
  add_model_inputs(*decide_cmd, o, true);
  add_statistics(*decide_cmd, o);
  decide_cmd->add_option("--radius", o.radius, "Ball radius");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Bisect for the largest robust radius at one point");
  add_model_inputs(*evaluate_cmd, o, true);
  add_statistics(*evaluate_cmd, o);
  evaluate_cmd->add_option("--radius-max", o.radius_max, "Upper bound R of the search");
  evaluate_cmd->add_option("--precision", o.precision, "Bracket width at which the search stops");
  evaluate_cmd->add_option("--stub-oracle", o.stub_oracle)->group("");

  auto* curve_cmd = app.add_subcommand("curve", "Fraction of dataset points decided robust per radius");
  add_model_inputs(*curve_cmd, o, false);
  add_statistics(*curve_cmd, o);
  curve_cmd->add_option("--radius-grid", o.radius_grid, "Radius grid min:max:step (inclusive)");
  curve_cmd->add_option("--radii", o.radii_list, "Explicit radius list r1,r2,...");
  curve_cmd->add_flag("--correct-only", o.correct_only, "Only count points the model classifies correctly");

  auto* radii_cmd = app.add_subcommand("radii", "Per-point robust radius distribution");
  add_model_inputs(*radii_cmd, o, false);
  add_statistics(*radii_cmd, o);
  radii_cmd->add_option("--radius-max", o.radius_max, "Upper bound R of the search");
  radii_cmd->add_option("--precision", o.precision, "Bracket width at which the search stops");
  radii_cmd->add_option("--stub-oracle", o.stub_oracle)->group("");

  auto* gadget_cmd = app.add_subcommand("gadget", "Encode a DIMACS CNF formula as a ReLU network");
  gadget_cmd->add_option("dimacs", o.dimacs_path, "DIMACS CNF file")->required();
  gadget_cmd->add_option("--out", o.out_path, "Model file to write");

  auto* sample_cmd = app.add_subcommand("sample", "Dump ball samples as CSV");
  sample_cmd->add_option("--norm", o.norm, "Ball norm: 1, 2 or inf")->capture_default_str();
  sample_cmd->add_option("--radius", o.radius, "Ball radius");
  sample_cmd->add_option("--count", o.count, "Number of samples")->capture_default_str();
  sample_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--center", o.center_path, "Center file (one numeric row)");
  sample_cmd->add_option("--dim", o.dim, "Dimension of a zero center");
  sample_cmd->add_option("--clamp", o.clamp_text, "Clip samples into lo,hi");
  sample_cmd->add_option("--l2-radius-law", o.l2_law, "l2 radial scale: gamma or uniform")->capture_default_str();
  sample_cmd->add_option("--out", o.out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*decide_cmd) return cmd_decide(o, out, err);
    if (*evaluate_cmd) return cmd_evaluate(o, out, err);
    if (*curve_cmd) return cmd_curve(o, out, err);
    if (*radii_cmd) return cmd_radii(o, out, err);
    if (*gadget_cmd) return cmd_gadget(o, out, err);
    if (*sample_cmd) return cmd_sample(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotApplicableError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"epsrob"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace epsrob
