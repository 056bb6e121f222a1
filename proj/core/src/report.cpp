#include "seqdet/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace seqdet {

std::string format_double(double value) {
  char buffer[40];
  // round-trip at 15/16/17 significant digits, shortest wins
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

std::string thresholds_csv(const std::vector<CalibrationRow>& rows) {
  std::string out = "# seqdet thresholds csv v1\n";
  out += "alpha,procedure,threshold\n";
  for (const auto& row : rows) {
    out += format_double(row.alpha);
    out += ',';
    out += procedure_name(row.procedure);
    out += ',';
    out += format_double(row.threshold);
    out += '\n';
  }
  return out;
}

std::string study_csv(const StudyReport& report) {
  std::string out = report.scheduled ? "# seqdet study csv v1+mu\n"
                                     : "# seqdet study csv v1\n";
  out +=
      "alpha,procedure,m,threshold,pfa_hat,pfa_se,delay_hat,delay_se,theory,"
      "ratio,seed,trials,censored";
  if (report.scheduled) out += ",mu";
  out += '\n';
  for (const auto& row : report.rows) {
    out += format_double(row.alpha);
    out += ',';
    out += procedure_name(row.procedure);
    out += ',';
    out += format_double(row.m);
    out += ',';
    out += format_double(row.threshold);
    out += ',';
    out += format_double(row.pfa_hat);
    out += ',';
    out += format_double(row.pfa_se);
    out += ',';
    out += format_double(row.delay_hat);
    out += ',';
    out += format_double(row.delay_se);
    out += ',';
    out += format_double(row.theory);
    out += ',';
    out += format_double(row.ratio);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += std::to_string(row.censored);
    if (report.scheduled) {
      out += ',';
      out += format_double(row.mu);
    }
    out += '\n';
  }
  return out;
}

std::string comparison_csv(const StudyReport& report) {
  // pair up rows by (alpha, m)
  std::map<std::pair<double, double>, std::pair<const StudyRow*, const StudyRow*>>
      pairs;
  for (const auto& row : report.rows) {
    auto& slot = pairs[{row.alpha, row.m}];
    if (row.procedure == Procedure::shiryaev) {
      slot.first = &row;
    } else {
      slot.second = &row;
    }
  }
  std::string out = "# seqdet comparison csv v1\n";
  out +=
      "alpha,m,delay_shiryaev,delay_sr,sr_to_shiryaev,efficiency_hat,"
      "efficiency_theory\n";
  for (const auto& [key, slot] : pairs) {
    const auto* sh = slot.first;
    const auto* sr = slot.second;
    if (sh == nullptr || sr == nullptr) continue;
    out += format_double(key.first);
    out += ',';
    out += format_double(key.second);
    out += ',';
    out += format_double(sh->delay_hat);
    out += ',';
    out += format_double(sr->delay_hat);
    out += ',';
    out += format_double(sr->delay_hat / sh->delay_hat);
    out += ',';
    out += format_double(sh->delay_hat / sr->delay_hat);
    out += ',';
    out += format_double(
        efficiency_ratio(report.information_rate, sh->mu, key.second));
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> study_series_files(
    const StudyReport& report) {
  std::map<std::pair<Procedure, double>, std::string> series;
  for (const auto& row : report.rows) {
    auto& body = series[{row.procedure, row.m}];
    if (body.empty()) {
      body = "# seqdet series: |log alpha| vs delay moment m=" +
             format_double(row.m) + " (" + procedure_name(row.procedure) +
             ")\n";
    }
    body += format_double(-std::log(row.alpha));
    body += ' ';
    body += format_double(row.delay_hat);
    body += '\n';
  }
  std::vector<std::pair<std::string, std::string>> files;
  files.reserve(series.size());
  for (auto& [key, body] : series) {
    std::string name = std::string("series_") + procedure_name(key.first) +
                       "_m" + format_double(key.second) + ".dat";
    files.emplace_back(std::move(name), std::move(body));
  }
  return files;
}

}  // namespace seqdet
