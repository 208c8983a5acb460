#include "kolmofix/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "kolmofix/error.hpp"

namespace kolmofix {
namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

Json witnesses(const std::vector<Witness>& ws) {
  Json out = Json::array();
  for (const Witness& w : ws) {
    out.push_back({{"x", w.x}, {"measure", w.measure}, {"excess", number(w.value)}, {"what", w.what}});
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace

Json to_json(const SolveReport& r) {
  Json j;
  j["status"] = status_name(r.status);
  j["iterations"] = r.iterates.size();
  Json its = Json::array();
  for (const IterateRecord& i : r.iterates) {
    its.push_back({{"iter", i.iter},
                   {"theta", number(i.theta)},
                   {"distance", number(i.distance)},
                   {"v_moment", number(i.v_moment)},
                   {"residual", number(i.residual)}});
  }
  j["iterates"] = its;
  j["final_distance"] = r.iterates.empty() ? Json(nullptr) : number(r.iterates.back().distance);
  j["final_residual"] = number(r.final_residual);
  j["worst_test_function"] = r.worst_test_function;
  j["in_PR"] = r.in_PR;
  j["cycle_detected"] = r.cycle_detected;
  const DiscreteMeasure& mu = r.final_measure;
  Json m;
  m["atoms"] = mu.size();
  m["mass"] = number(mu.mass());
  Json means = Json::array();
  Json second = Json::array();
  for (int i = 0; i < mu.dim(); ++i) {
    means.push_back(number(mean(mu, i)));
    second.push_back(number(moment(mu, 2, {MomentKind::component, i})));
  }
  m["mean"] = means;
  m["second_moment"] = second;
  m["first_abs_moment"] = number(moment(mu, 1));
  j["final_measure"] = m;
  if (!r.levels.empty()) {
    Json lv = Json::array();
    for (const LevelRecord& l : r.levels) {
      lv.push_back({{"n", l.n},
                    {"status", status_name(l.status)},
                    {"v_moment", number(l.v_moment)},
                    {"mass_defect", number(l.mass_defect)},
                    {"iterations", l.iterations},
                    {"error", l.error}});
    }
    j["levels"] = lv;
    j["uniform_bound"] = number(r.uniform_bound);
    j["bound_estimate"] = number(r.bound_estimate);
    j["bound_ok"] = r.bound_ok;
  }
  j["notes"] = r.notes;
  return j;
}

Json to_json(const CheckReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["passed"] = r.passed;
  j["C"] = number(r.C);
  j["Lambda"] = number(r.Lambda);
  j["max_excess"] = number(r.max_excess);
  j["best_C"] = number(r.best_C);
  j["best_Lambda"] = number(r.best_Lambda);
  if (!std::isnan(r.value)) j["value"] = number(r.value);
  if (!std::isnan(r.bound)) j["bound"] = number(r.bound);
  j["measures"] = r.measures;
  j["evaluations"] = r.evaluations;
  j["witnesses"] = witnesses(r.witnesses);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const SweepReport& r) {
  Json j;
  j["any_passed"] = r.any_passed;
  j["all_failed_with_witness"] = r.all_failed_with_witness;
  Json e = Json::array();
  for (const CheckReport& c : r.entries) {
    Json x{{"C", number(c.C)}, {"Lambda", number(c.Lambda)}, {"passed", c.passed}, {"max_excess", number(c.max_excess)}};
    x["witness"] = c.witnesses.empty() ? Json(nullptr) : witnesses({c.witnesses.front()}).front();
    e.push_back(x);
  }
  j["entries"] = e;
  return j;
}

Json to_json(const AssumptionReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["passed"] = r.passed;
  j["lambda_est"] = number(r.lambda_est);
  j["sup_bound_est"] = number(r.sup_bound_est);
  Json mod = Json::array();
  for (const auto& [dist, gap] : r.modulus_samples) mod.push_back({number(dist), number(gap)});
  j["modulus_samples"] = mod;
  j["violations"] = witnesses(r.violations);
  j["evaluations"] = r.evaluations;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const RegularityReport& r) {
  Json j;
  j["m"] = r.m;
  j["r"] = number(r.r);
  j["projected_mass"] = number(r.projected_mass);
  Json s = Json::array();
  for (const auto& [h, n] : r.schedule) s.push_back({{"bandwidth", number(h)}, {"norm", number(n)}});
  j["schedule"] = s;
  j["extrapolated_norm"] = number(r.extrapolated);
  j["growth_exponent"] = number(r.growth_exponent);
  j["in_class"] = r.in_class;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const TrendReport& r) {
  Json j;
  j["what"] = r.what;
  Json p = Json::array();
  Json g = Json::array();
  for (double v : r.params) p.push_back(number(v));
  for (double v : r.gaps) g.push_back(number(v));
  j["params"] = p;
  j["gaps"] = g;
  j["slope"] = number(r.slope);
  j["monotone"] = r.monotone;
  j["final_gap"] = number(r.final_gap);
  j["passed"] = r.passed;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ResidualReport& r, const std::vector<TestFunction>& battery) {
  Json j;
  j["max_abs"] = number(r.max_abs);
  j["worst"] = r.worst;
  Json v = Json::object();
  for (std::size_t i = 0; i < r.values.size() && i < battery.size(); ++i) v[battery[i].name] = number(r.values[i]);
  j["values"] = v;
  return j;
}

void write_report(const std::string& path, const Json& body) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["timestamp"] = utc_now();
  for (const auto& [k, v] : body.items()) j[k] = v;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_iterates_csv(const std::string& path, const SolveReport& r) {
  std::ofstream out = open_out(path);
  out << "iter,theta,distance,v_moment,residual\n";
  char buf[160];
  for (const IterateRecord& i : r.iterates) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", i.iter, i.theta, i.distance, i.v_moment, i.residual);
    out << buf;
  }
}

void write_trend_csv(const std::string& path, const TrendReport& r) {
  std::ofstream out = open_out(path);
  out << "param,gap\n";
  char buf[80];
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.params[i], r.gaps[i]);
    out << buf;
  }
}

}  // namespace kolmofix
