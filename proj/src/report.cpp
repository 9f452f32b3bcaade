// Copyright 2026 The robeval Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robeval/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "robeval/error.hpp"
#include "robeval/seed.hpp"

namespace robeval {
namespace {

constexpr std::array<std::pair<VariantFilter, std::string_view>, 4> kFilterNames{{
    {VariantFilter::kAll, "all"},
    {VariantFilter::kSuperficial, "superficial"},
    {VariantFilter::kParaphrase, "paraphrase"},
    {VariantFilter::kDistraction, "distraction"},
}};

constexpr std::array<VariantType, 3> kPerturbedTypes{VariantType::kSuperficial, VariantType::kParaphrase,
                                                     VariantType::kDistraction};

VariantFilter filter_for(VariantType type) {
  switch (type) {
    case VariantType::kSuperficial:
      return VariantFilter::kSuperficial;
    case VariantType::kParaphrase:
      return VariantFilter::kParaphrase;
    case VariantType::kDistraction:
      return VariantFilter::kDistraction;
    case VariantType::kOriginal:
      break;
  }
  return VariantFilter::kAll;
}

std::optional<VariantType> type_for(VariantFilter filter) {
  switch (filter) {
    case VariantFilter::kSuperficial:
      return VariantType::kSuperficial;
    case VariantFilter::kParaphrase:
      return VariantType::kParaphrase;
    case VariantFilter::kDistraction:
      return VariantType::kDistraction;
    case VariantFilter::kAll:
      break;
  }
  return std::nullopt;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::string num(double v) { return fmt::format("{}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorCode::kParse, fmt::format("report: bad number '{}'", s));
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorCode::kParse, fmt::format("report: bad boolean '{}'", s));
}

std::vector<std::string> csv_fields(const ReportRow& r) {
  return {csv_escape(r.model),
          csv_escape(r.dataset),
          std::string(to_string(r.variant_filter)),
          std::to_string(r.n_groups),
          num(r.mean_orig),
          num(r.mean_pert),
          num(r.nh_mean),
          num(r.nh_lo),
          num(r.nh_hi),
          r.nh_significant ? "true" : "false",
          std::string(to_string(r.nh_category)),
          num(r.anh_mean),
          num(r.anh_lo),
          num(r.anh_hi),
          r.anh_significant ? "true" : "false",
          std::string(to_string(r.anh_category)),
          num(r.pdr_mean),
          num(r.pdr_lo),
          num(r.pdr_hi),
          std::to_string(r.pdr_n_undefined)};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json row_json(const ReportRow& r) {
  return Json{{"model", r.model},
              {"dataset", r.dataset},
              {"variant_filter", to_string(r.variant_filter)},
              {"n_groups", r.n_groups},
              {"mean_orig", r.mean_orig},
              {"mean_pert", r.mean_pert},
              {"nh_mean", r.nh_mean},
              {"nh_lo", r.nh_lo},
              {"nh_hi", r.nh_hi},
              {"nh_significant", r.nh_significant},
              {"nh_category", to_string(r.nh_category)},
              {"anh_mean", r.anh_mean},
              {"anh_lo", r.anh_lo},
              {"anh_hi", r.anh_hi},
              {"anh_significant", r.anh_significant},
              {"anh_category", to_string(r.anh_category)},
              {"pdr_mean", optional_json(r.pdr_mean)},
              {"pdr_lo", optional_json(r.pdr_lo)},
              {"pdr_hi", optional_json(r.pdr_hi)},
              {"pdr_n_undefined", r.pdr_n_undefined}};
}

std::string render_csv(const RobustnessReport& report, const std::optional<FileMeta>& meta) {
  std::ostringstream out;
  if (meta) out << "# " << dump_compact(meta->to_json()) << '\n';
  out << kReportCsvHeader << '\n';
  for (const auto& row : report.rows) {
    const auto fields = csv_fields(row);
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
  return out.str();
}

std::string render_json(const RobustnessReport& report, const std::optional<FileMeta>& meta) {
  Json doc = Json::object();
  if (meta) doc["meta"] = meta->to_json();
  doc["rows"] = Json::array();
  for (const auto& row : report.rows) doc["rows"].push_back(row_json(row));
  return doc.dump(2) + "\n";
}

std::string render_markdown(const RobustnessReport& report, const std::optional<FileMeta>& meta) {
  std::ostringstream out;
  if (meta) out << "<!-- robeval " << dump_compact(meta->to_json()) << " -->\n\n";
  out << "| Model | Dataset | Variants | n | M(orig) | M(pert.) | NCoH | ANCoH | PDR | NCoH size | "
         "ANCoH size |\n";
  out << "|---|---|---|---:|---:|---:|---:|---:|---:|---|---|\n";
  for (const auto& r : report.rows) {
    out << fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", r.model, r.dataset,
                       to_string(r.variant_filter), r.n_groups, format_cell(r.mean_orig, false),
                       format_cell(r.mean_pert, false), format_cell(r.nh_mean, r.nh_significant),
                       format_cell(r.anh_mean, r.anh_significant),
                       r.pdr_mean ? format_cell(*r.pdr_mean, false) : std::string("--"),
                       to_string(r.nh_category), to_string(r.anh_category));
  }
  return out.str();
}

}  // namespace

std::string_view to_string(VariantFilter filter) {
  for (const auto& [f, name] : kFilterNames)
    if (f == filter) return name;
  return "all";
}

VariantFilter parse_variant_filter(std::string_view name) {
  for (const auto& [f, n] : kFilterNames)
    if (n == name) return f;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown variant filter '{}'", name));
}

ReportRow aggregate(std::span<const GroupScores> groups, VariantFilter filter,
                    const BootstrapConfig& config, std::string_view model, std::string_view dataset) {
  config.validate();
  std::vector<GroupScores> selected;
  std::vector<double> originals;
  for (const auto& g : groups) {
    originals.push_back(g.score_o);
    if (auto type = type_for(filter)) {
      if (auto restricted = g.restricted_to(*type)) selected.push_back(std::move(*restricted));
    } else {
      selected.push_back(g);
    }
  }
  if (selected.empty()) {
    throw Error(ErrorCode::kData, fmt::format("no groups with {} variants for {}/{}", to_string(filter),
                                              model, dataset));
  }
  std::sort(selected.begin(), selected.end(),
            [](const GroupScores& a, const GroupScores& b) { return a.group_id < b.group_id; });

  std::vector<double> pert, nh, anh;
  std::vector<std::optional<double>> pdrs;
  for (const auto& g : selected) {
    const GroupMetrics m = group_metrics(g);
    pert.push_back(g.score_p);
    nh.push_back(m.effect.nh);
    anh.push_back(m.effect.anh);
    pdrs.push_back(m.pdr.value);
  }

  ReportRow row;
  row.model = model;
  row.dataset = dataset;
  row.variant_filter = filter;
  row.n_groups = selected.size();
  // Over all input groups, whatever the filter.
  row.mean_orig = mean(originals);
  row.mean_pert = mean(pert);

  const std::string row_key = fmt::format("{}\x1f{}\x1f{}", model, dataset, to_string(filter));
  auto config_for = [&](std::string_view metric) {
    BootstrapConfig c = config;
    c.seed = derive_seed(config.seed, row_key, metric);
    return c;
  };

  const IntervalEstimate nh_ci = bootstrap_ci(nh, config_for("nh"));
  row.nh_mean = nh_ci.mean;
  row.nh_lo = nh_ci.lo;
  row.nh_hi = nh_ci.hi;
  row.nh_significant = significant(nh_ci);
  row.nh_category = classify_effect(row.nh_mean * std::numbers::pi);

  const IntervalEstimate anh_ci = bootstrap_ci(anh, config_for("anh"));
  row.anh_mean = anh_ci.mean;
  row.anh_lo = anh_ci.lo;
  row.anh_hi = anh_ci.hi;
  row.anh_significant = significant(anh_ci);
  row.anh_category = classify_effect(row.anh_mean * std::numbers::pi);

  const auto defined = std::count_if(pdrs.begin(), pdrs.end(), [](const auto& p) { return p.has_value(); });
  row.pdr_n_undefined = pdrs.size() - static_cast<std::size_t>(defined);
  if (defined > 0) {
    const IntervalEstimate pdr_ci = bootstrap_ci(pdrs, config_for("pdr"));
    row.pdr_mean = pdr_ci.mean;
    row.pdr_lo = pdr_ci.lo;
    row.pdr_hi = pdr_ci.hi;
  }
  return row;
}

std::vector<ReportRow> breakdown_by_type(std::span<const GroupScores> groups, const BootstrapConfig& config,
                                         std::string_view model, std::string_view dataset) {
  std::vector<ReportRow> rows{aggregate(groups, VariantFilter::kAll, config, model, dataset)};
  for (VariantType type : kPerturbedTypes) {
    const bool present = std::any_of(groups.begin(), groups.end(), [&](const GroupScores& g) {
      return std::any_of(g.variant_scores.begin(), g.variant_scores.end(),
                         [&](const VariantScore& v) { return v.variant_type == type; });
    });
    if (present) rows.push_back(aggregate(groups, filter_for(type), config, model, dataset));
  }
  return rows;
}

CorrelationCurve correlation_curve(double score_o, double grid_step) {
  if (!(score_o > 0.0 && score_o <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("correlation curve needs score_o in (0, 1], got {}", score_o));
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("grid step {} is outside (0, 1]", grid_step));
  }
  const double steps = 1.0 / grid_step;
  const auto n = static_cast<std::size_t>(std::llround(steps));
  if (std::fabs(static_cast<double>(n) - steps) > 1e-9 * steps) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("grid step {} does not divide 1 evenly", grid_step));
  }

  CorrelationCurve curve;
  curve.score_o = score_o;
  std::vector<double> nh, reverse;
  for (std::size_t k = 0; k <= n; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(n);
    const CurvePoint point{p, cohens_h(score_o, p).nh, -*pdr(score_o, p).value};
    curve.points.push_back(point);
    nh.push_back(point.nh);
    reverse.push_back(point.reverse_pdr);
  }
  curve.pearson_r = pearson_r(nh, reverse);
  return curve;
}

std::string format_cell(double value, bool is_significant) {
  std::string s = fmt::format("{:.2f}", value);
  if (s == "-0.00") s = "0.00";
  if (is_significant) s += '*';
  return s;
}

std::string render(const RobustnessReport& report, ReportFormat format, const std::optional<FileMeta>& meta) {
  switch (format) {
    case ReportFormat::kJson:
      return render_json(report, meta);
    case ReportFormat::kCsv:
      return render_csv(report, meta);
    case ReportFormat::kMarkdown:
      return render_markdown(report, meta);
  }
  return {};
}

void write_report(const RobustnessReport& report, ReportFormat format, const std::filesystem::path& path,
                  const std::optional<FileMeta>& meta) {
  const std::string content = render(report, format, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content).flush()) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  }
}

RobustnessReport report_from_csv(std::string_view csv) {
  RobustnessReport report;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kReportCsvHeader) throw Error(ErrorCode::kParse, "report CSV: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 20) {
      throw Error(ErrorCode::kParse, fmt::format("report CSV: expected 20 fields, got {}", f.size()));
    }
    ReportRow r;
    r.model = f[0];
    r.dataset = f[1];
    r.variant_filter = parse_variant_filter(f[2]);
    r.n_groups = static_cast<std::size_t>(std::stoull(f[3]));
    r.mean_orig = parse_double(f[4]);
    r.mean_pert = parse_double(f[5]);
    r.nh_mean = parse_double(f[6]);
    r.nh_lo = parse_double(f[7]);
    r.nh_hi = parse_double(f[8]);
    r.nh_significant = parse_bool(f[9]);
    r.nh_category = parse_effect_category(f[10]);
    r.anh_mean = parse_double(f[11]);
    r.anh_lo = parse_double(f[12]);
    r.anh_hi = parse_double(f[13]);
    r.anh_significant = parse_bool(f[14]);
    r.anh_category = parse_effect_category(f[15]);
    r.pdr_mean = parse_optional(f[16]);
    r.pdr_lo = parse_optional(f[17]);
    r.pdr_hi = parse_optional(f[18]);
    r.pdr_n_undefined = static_cast<std::size_t>(std::stoull(f[19]));
    report.rows.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::kParse, "report CSV: missing header");
  return report;
}

RobustnessReport report_from_json(const Json& value) {
  RobustnessReport report;
  auto opt = [](const Json& j) -> std::optional<double> {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
  };
  try {
    for (const auto& j : value.at("rows")) {
      ReportRow r;
      r.model = j.at("model").get<std::string>();
      r.dataset = j.at("dataset").get<std::string>();
      r.variant_filter = parse_variant_filter(j.at("variant_filter").get<std::string>());
      r.n_groups = j.at("n_groups").get<std::size_t>();
      r.mean_orig = j.at("mean_orig").get<double>();
      r.mean_pert = j.at("mean_pert").get<double>();
      r.nh_mean = j.at("nh_mean").get<double>();
      r.nh_lo = j.at("nh_lo").get<double>();
      r.nh_hi = j.at("nh_hi").get<double>();
      r.nh_significant = j.at("nh_significant").get<bool>();
      r.nh_category = parse_effect_category(j.at("nh_category").get<std::string>());
      r.anh_mean = j.at("anh_mean").get<double>();
      r.anh_lo = j.at("anh_lo").get<double>();
      r.anh_hi = j.at("anh_hi").get<double>();
      r.anh_significant = j.at("anh_significant").get<bool>();
      r.anh_category = parse_effect_category(j.at("anh_category").get<std::string>());
      r.pdr_mean = opt(j.at("pdr_mean"));
      r.pdr_lo = opt(j.at("pdr_lo"));
      r.pdr_hi = opt(j.at("pdr_hi"));
      r.pdr_n_undefined = j.at("pdr_n_undefined").get<std::size_t>();
      report.rows.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("report JSON: {}", e.what()));
  }
  return report;
}

std::string render_curve_csv(const CorrelationCurve& curve, const std::optional<FileMeta>& meta) {
  std::ostringstream out;
  if (meta) out << "# " << dump_compact(meta->to_json()) << '\n';
  out << "score_p,nh,reverse_pdr\n";
  for (const auto& p : curve.points) out << num(p.score_p) << ',' << num(p.nh) << ',' << num(p.reverse_pdr) << '\n';
  out << "# pearson_r=" << num(curve.pearson_r) << '\n';
  return out.str();
}

}  // namespace robeval
