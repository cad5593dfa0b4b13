#include "crashml/reports.hpp"

#include <charconv>
#include <ostream>

#include <nlohmann/json.hpp>

namespace crashml {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

nlohmann::json report_json(const MetricsReport& r) {
  return nlohmann::json{
      {"accuracy", r.accuracy},
      {"precision", r.precision},
      {"recall", r.recall},
      {"f1", r.f1},
      {"kappa", r.kappa},
      {"kappa_band", std::string(to_string(r.kappa_band))},
      {"auc_pr", r.auc_pr},
      {"auc_roc", r.auc_roc},
      {"pr_baseline", r.pr_baseline},
  };
}

}  // namespace

void write_pr_csv(const PRCurve& curve, std::ostream& out) {
  out << "threshold,recall,precision\n";
  for (const PRPoint& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.recall) << ','
        << format_double(p.precision) << '\n';
  }
}

std::string metrics_to_json(const MetricsReport& report) {
  return report_json(report).dump(2) + "\n";
}

std::string run_metrics_to_json(const MetricsReport& validation,
                                const MetricsReport& test) {
  const nlohmann::json doc{
      {"validation", report_json(validation)},
      {"test", report_json(test)},
  };
  return doc.dump(2) + "\n";
}

void write_ranking_csv(const std::vector<RankedAttribute>& ranking, std::ostream& out) {
  out << "rank,attribute,chi2,df,critical,significant\n";
  for (const RankedAttribute& r : ranking) {
    out << r.rank << ',' << r.name << ',' << format_double(r.chi2) << ',' << r.df << ','
        << format_double(r.critical) << ',' << (r.significant ? "true" : "false")
        << '\n';
  }
}

std::string ranking_to_json(const std::vector<RankedAttribute>& ranking) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RankedAttribute& r : ranking) {
    arr.push_back({
        {"rank", r.rank},
        {"attribute", r.name},
        {"chi2", r.chi2},
        {"df", r.df},
        {"critical", r.critical},
        {"significant", r.significant},
    });
  }
  return arr.dump(2) + "\n";
}

}  // namespace crashml
