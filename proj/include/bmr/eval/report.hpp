#ifndef BMR_EVAL_REPORT_HPP
#define BMR_EVAL_REPORT_HPP

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bmr/core/errors.hpp"
#include "bmr/eval/metrics.hpp"
#include "bmr/io/csv.hpp"

namespace bmr {

/// One method applied to one simulated replicate.
struct StudyRecord {
  std::string scenario;
  std::string hypothesis;  // "null" or "alternative"
  double theta_true = 0.0;
  std::size_t replicate = 0;
  std::string method;  // "bayes" or "wme"
  bool ok = false;     // false when the fit failed outright
  bool reliable = true;
  IntervalEstimate interval;
};

inline std::vector<IntervalEstimate> select(const std::vector<StudyRecord>& records, const std::string& scenario,
                                            const std::string& hypothesis, const std::string& method) {
  std::vector<IntervalEstimate> out;
  for (const auto& r : records) {
    if (r.ok && r.scenario == scenario && r.hypothesis == hypothesis && r.method == method) out.push_back(r.interval);
  }
  return out;
}

/// Performance of one method within one scenario, both hypotheses.
struct MethodMetrics {
  double coverage_null = 0.0;
  double coverage_alternative = 0.0;
  double power = 0.0;
  double bias_null = 0.0;
  double bias_alternative = 0.0;
  std::size_t failed = 0;
  std::size_t unreliable = 0;
};

struct ScenarioRow {
  std::string scenario;
  std::string pleiotropy;
  std::size_t sample_size = 0;
  std::size_t replicates = 0;
  double theta_alternative = 0.0;
  MethodMetrics bayes;
  MethodMetrics wme;
};

inline MethodMetrics method_metrics(const std::vector<StudyRecord>& records, const std::string& scenario,
                                    const std::string& method, double theta_alternative) {
  MethodMetrics m;
  const auto null_runs = select(records, scenario, "null", method);
  const auto alt_runs = select(records, scenario, "alternative", method);
  m.coverage_null = coverage(null_runs, 0.0);
  m.bias_null = bias(null_runs, 0.0);
  m.coverage_alternative = coverage(alt_runs, theta_alternative);
  m.bias_alternative = bias(alt_runs, theta_alternative);
  m.power = power(alt_runs);
  for (const auto& r : records) {
    if (r.scenario != scenario || r.method != method) continue;
    if (!r.ok) ++m.failed;
    if (r.ok && !r.reliable) ++m.unreliable;
  }
  return m;
}

// ---- serialization ------------------------------------------------------

inline void write_records(std::ostream& out, const std::vector<StudyRecord>& records) {
  out << "scenario,hypothesis,theta_true,replicate,method,status,reliable,estimate,low,high\n";
  for (const auto& r : records) {
    out << r.scenario << ',' << r.hypothesis << ',' << io::format_double(r.theta_true) << ',' << r.replicate << ','
        << r.method << ',' << (r.ok ? "ok" : "failed") << ',' << (r.reliable ? 1 : 0) << ','
        << io::format_double(r.interval.estimate) << ',' << io::format_double(r.interval.low) << ','
        << io::format_double(r.interval.high) << '\n';
  }
}

inline std::vector<StudyRecord> read_records(std::istream& in, const std::string& source) {
  const io::TextTable t = io::read_text_table(in, source);
  const std::size_t sc = t.index("scenario"), hy = t.index("hypothesis"), th = t.index("theta_true"),
                    rep = t.index("replicate"), me = t.index("method"), st = t.index("status"),
                    rel = t.index("reliable"), es = t.index("estimate"), lo = t.index("low"), hi = t.index("high");
  std::vector<StudyRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    StudyRecord r;
    r.scenario = row[sc];
    r.hypothesis = row[hy];
    r.theta_true = io::cell_number(t, i, th, source);
    r.replicate = static_cast<std::size_t>(io::cell_number(t, i, rep, source));
    r.method = row[me];
    if (row[st] != "ok" && row[st] != "failed") {
      throw InputError(source + ": row " + std::to_string(t.lines[i]) + ", column status: expected ok or failed");
    }
    r.ok = row[st] == "ok";
    r.reliable = io::cell_number(t, i, rel, source) != 0.0;
    r.interval.estimate = io::cell_number(t, i, es, source);
    r.interval.low = io::cell_number(t, i, lo, source);
    r.interval.high = io::cell_number(t, i, hi, source);
    out.push_back(r);
  }
  return out;
}

/// Table-shaped summary: one row per scenario, metric columns for both
/// methods.
inline void write_table(std::ostream& out, const std::vector<ScenarioRow>& rows) {
  out << "scenario,pleiotropy,sample_size,replicates,theta_alternative";
  for (const char* m : {"bayes", "wme"}) {
    for (const char* c : {"coverage_null", "coverage_alternative", "power", "bias_null", "bias_alternative",
                          "failed", "unreliable"}) {
      out << ',' << m << '_' << c;
    }
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.pleiotropy << ',' << r.sample_size << ',' << r.replicates << ','
        << io::format_double(r.theta_alternative);
    for (const MethodMetrics* m : {&r.bayes, &r.wme}) {
      out << ',' << io::format_double(m->coverage_null) << ',' << io::format_double(m->coverage_alternative) << ','
          << io::format_double(m->power) << ',' << io::format_double(m->bias_null) << ','
          << io::format_double(m->bias_alternative) << ',' << m->failed << ',' << m->unreliable;
    }
    out << '\n';
  }
}

/// Per-instrument posterior-mean shrinkage weights of one fit.
struct KappaRecord {
  std::string scenario;
  std::string hypothesis;
  std::size_t replicate = 0;
  ShrinkageGroups groups;
};

inline void write_kappa_records(std::ostream& out, const std::vector<KappaRecord>& records) {
  out << "scenario,hypothesis,replicate,instrument,pleiotropic,kappa_mean\n";
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.groups.pleiotropic.size(); ++k) {
      out << r.scenario << ',' << r.hypothesis << ',' << r.replicate << ",z" << (k + 1) << ','
          << (r.groups.pleiotropic[k] ? 1 : 0) << ','
          << io::format_double(r.groups.kappa_mean[static_cast<Eigen::Index>(k)]) << '\n';
    }
  }
}

}  // namespace bmr

#endif  // BMR_EVAL_REPORT_HPP
