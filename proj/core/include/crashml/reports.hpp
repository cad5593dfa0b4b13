#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crashml/metrics.hpp"
#include "crashml/ranking.hpp"

namespace crashml {

/// "threshold,recall,precision" rows, shortest round-trip number formatting.
void write_pr_csv(const PRCurve& curve, std::ostream& out);

/// The nine report fields as a JSON object (keys in alphabetical order).
std::string metrics_to_json(const MetricsReport& report);

/// Two named reports ("validation", "test") in one document.
std::string run_metrics_to_json(const MetricsReport& validation,
                                const MetricsReport& test);

/// "rank,attribute,chi2,df,critical,significant" rows.
void write_ranking_csv(const std::vector<RankedAttribute>& ranking, std::ostream& out);

std::string ranking_to_json(const std::vector<RankedAttribute>& ranking);

}  // namespace crashml
