// Copyright 2026 The qbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qbo/csv.hpp"
#include "qbo/dataset.hpp"
#include "qbo/driver.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/objective.hpp"

namespace qbo {

inline constexpr const char* kTraceSchema = "# schema: qbo.trace/1";

/// Everything needed to rebuild a run's report: the run header, the
/// initial dataset and the loop records.
struct TraceData {
  std::string label;
  bool baseline = false;
  double sigma2 = 0.0;
  double lambda = 0.0;
  double threshold = 0.0;
  Orientation orientation = Orientation::kMinimize;
  std::uint64_t master_seed = 0;
  DesignSpace space;
  std::size_t loops_planned = 0;
  std::size_t batch_size = 0;
  Dataset initial;
  std::vector<LoopRecord> loops;
};

namespace detail {

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::json trace_header_json(const TraceData& t) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : t.space.sites()) sites.push_back({{"name", s.name}, {"cardinality", s.cardinality}});
  return {{"type", "header"},
          {"label", t.label},
          {"baseline", t.baseline},
          {"sigma2", detail::number_or_null(t.sigma2)},
          {"lambda", t.lambda},
          {"threshold", t.threshold},
          {"orientation", to_string(t.orientation)},
          {"master_seed", t.master_seed},
          {"loops", t.loops_planned},
          {"batch_size", t.batch_size},
          {"sites", sites}};
}

inline nlohmann::json initial_json(const Dataset& data) {
  nlohmann::json xs = nlohmann::json::array(), ys = nlohmann::json::array();
  for (const auto& row : data) {
    xs.push_back(row.x.to_string());
    ys.push_back(row.y);
  }
  return {{"type", "initial"}, {"x", xs}, {"y", ys}};
}

inline nlohmann::json loop_json(const LoopRecord& rec) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : rec.proposals)
    props.push_back({{"x", p.x.to_string()}, {"energy", detail::number_or_null(p.energy)}, {"y", p.y}});
  return {{"type", "loop"},
          {"loop", rec.loop},
          {"alpha_seed", rec.alpha_seed},
          {"alpha_hash", rec.alpha_hash},
          {"r2", detail::number_or_null(rec.r2)},
          {"best", rec.best_so_far},
          {"shortfall", rec.shortfall},
          {"complete", rec.complete},
          {"proposals", props}};
}

/// Line-delimited trace writer; every record is flushed as it is written so
/// an interrupted run leaves a readable prefix.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, bool append) : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw IoError("cannot open trace " + path);
  }

  void begin(const TraceData& header) {
    out_ << kTraceSchema << '\n'
         << trace_header_json(header).dump() << '\n'
         << initial_json(header.initial).dump() << '\n';
    out_.flush();
  }

  void loop(const LoopRecord& rec) {
    out_ << loop_json(rec).dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

inline TraceData trace_from_run(const RunConfig& cfg, const Dataset& initial, const RunResult& run,
                                Orientation orientation) {
  TraceData t;
  t.label = run.label;
  t.baseline = run.baseline;
  t.sigma2 = run.sigma2;
  t.lambda = cfg.lambda;
  t.threshold = cfg.threshold;
  t.orientation = orientation;
  t.master_seed = cfg.master_seed;
  t.space = cfg.space;
  t.loops_planned = cfg.loops;
  t.batch_size = cfg.batch_size;
  t.initial = initial;
  t.loops = run.loops;
  return t;
}

inline void write_trace(std::ostream& os, const TraceData& t) {
  os << kTraceSchema << '\n' << trace_header_json(t).dump() << '\n' << initial_json(t.initial).dump() << '\n';
  for (const auto& rec : t.loops) os << loop_json(rec).dump() << '\n';
}

/// Parses a trace. A truncated final line (interrupted write) is dropped.
inline TraceData read_trace(std::istream& is) {
  TraceData t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false, have_initial = false, have_schema = false;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const auto& l = lines[idx];
    ++lineno;
    const auto where = "trace line " + std::to_string(lineno) + ": ";
    if (csv::trim(l).empty()) continue;
    if (l.front() == '#') {
      if (csv::trim(l) == kTraceSchema) have_schema = true;
      continue;
    }
    if (!have_schema) throw SchemaError(where + "missing schema line '" + std::string(kTraceSchema) + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(l);
    } catch (const nlohmann::json::parse_error&) {
      if (idx + 1 == lines.size() && have_initial) break;
      throw SchemaError(where + "malformed JSON record");
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        std::vector<std::pair<std::string, std::uint64_t>> sites;
        for (const auto& s : j.at("sites")) sites.emplace_back(s.at("name").get<std::string>(), s.at("cardinality").get<std::uint64_t>());
        t.space = DesignSpace(sites);
        t.label = j.at("label").get<std::string>();
        t.baseline = j.at("baseline").get<bool>();
        t.sigma2 = detail::number_or_nan(j.at("sigma2"));
        t.lambda = j.at("lambda").get<double>();
        t.threshold = j.at("threshold").get<double>();
        t.orientation = parse_orientation(j.at("orientation").get<std::string>());
        t.master_seed = j.at("master_seed").get<std::uint64_t>();
        t.loops_planned = j.at("loops").get<std::size_t>();
        t.batch_size = j.at("batch_size").get<std::size_t>();
        t.initial = Dataset(t.space.total_bits());
        have_header = true;
      } else if (type == "initial") {
        if (!have_header) throw SchemaError(where + "initial record before header");
        const auto& xs = j.at("x");
        const auto& ys = j.at("y");
        if (xs.size() != ys.size()) throw SchemaError(where + "initial x and y lengths differ");
        for (std::size_t i = 0; i < xs.size(); ++i)
          t.initial.append(BitVector::from_string(xs[i].get<std::string>()), ys[i].get<double>(), 0);
        have_initial = true;
      } else if (type == "loop") {
        if (!have_initial) throw SchemaError(where + "loop record before initial data");
        LoopRecord rec;
        rec.loop = j.at("loop").get<std::size_t>();
        rec.alpha_seed = j.at("alpha_seed").get<std::uint64_t>();
        rec.alpha_hash = j.at("alpha_hash").get<std::uint64_t>();
        rec.r2 = detail::number_or_nan(j.at("r2"));
        rec.best_so_far = j.at("best").get<double>();
        rec.shortfall = j.at("shortfall").get<bool>();
        rec.complete = j.at("complete").get<bool>();
        for (const auto& p : j.at("proposals")) {
          Proposal prop{BitVector::from_string(p.at("x").get<std::string>()), detail::number_or_nan(p.at("energy")),
                        p.at("y").get<double>()};
          if (prop.x.size() != t.space.total_bits()) throw SchemaError(where + "proposal has wrong width");
          rec.proposals.push_back(std::move(prop));
        }
        t.loops.push_back(std::move(rec));
      } else {
        throw SchemaError(where + "unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    }
  }
  if (!have_header || !have_initial) throw SchemaError("trace lacks a header or initial record");
  return t;
}

inline TraceData read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path);
  return read_trace(in);
}

/// Points evaluated during the loops, in order.
inline std::vector<Proposal> added_points(const TraceData& t) {
  std::vector<Proposal> out;
  for (const auto& rec : t.loops)
    for (const auto& p : rec.proposals) out.push_back(p);
  return out;
}

/// Number of distinct (site, category) values among the given points.
inline std::size_t distinct_site_values(const DesignSpace& space, const std::vector<BitVector>& points) {
  std::set<std::pair<std::size_t, std::uint64_t>> seen;
  for (const auto& x : points) {
    const auto d = decode(space, x);
    for (std::size_t s = 0; s < d.indices.size(); ++s) seen.emplace(s, d.indices[s]);
  }
  return seen.size();
}

inline std::vector<BitVector> proposal_points(const std::vector<LoopRecord>& loops) {
  std::vector<BitVector> out;
  for (const auto& rec : loops)
    for (const auto& p : rec.proposals) out.push_back(p.x);
  return out;
}

/// Per-site category counts of the points added during the loops.
inline std::vector<std::vector<std::size_t>> site_histograms(const TraceData& t) {
  std::vector<std::vector<std::size_t>> h;
  for (const auto& s : t.space.sites()) h.emplace_back(s.cardinality, 0);
  for (const auto& p : added_points(t)) {
    const auto d = decode(t.space, p.x);
    for (std::size_t s = 0; s < d.indices.size(); ++s)
      if (d.indices[s] < h[s].size()) ++h[s][d.indices[s]];
  }
  return h;
}

struct ThresholdRow {
  Assignment sites;
  double y = 0.0;  // reported orientation
  std::size_t loop = 0;
};

/// Added points whose reported value is >= threshold, sorted by value
/// descending, ties by site indices ascending.
inline std::vector<ThresholdRow> above_threshold(const TraceData& t, double threshold) {
  std::vector<ThresholdRow> rows;
  for (const auto& rec : t.loops)
    for (const auto& p : rec.proposals) {
      const double y = to_reported(t.orientation, p.y);
      if (y >= threshold) rows.push_back({decode(t.space, p.x).indices, y, rec.loop});
    }
  std::stable_sort(rows.begin(), rows.end(), [](const ThresholdRow& a, const ThresholdRow& b) {
    if (a.y != b.y) return a.y > b.y;
    return a.sites < b.sites;
  });
  return rows;
}

/// Internal best after loop l for l = 0 (initial data) .. last loop.
inline std::vector<double> best_so_far_series(const TraceData& t) {
  std::vector<double> out;
  double best = best_value(t.initial);
  out.push_back(best);
  for (const auto& rec : t.loops) {
    for (const auto& p : rec.proposals) best = std::min(best, p.y);
    out.push_back(best);
  }
  return out;
}

inline constexpr std::size_t kValueHistogramBins = 20;

struct ReportFiles {
  std::vector<std::filesystem::path> written;
};

namespace detail {

inline std::ofstream open_artifact(const std::filesystem::path& path, const std::string& schema,
                                   ReportFiles& files) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# schema: qbo." << schema << "/1\n";
  files.written.push_back(path);
  return out;
}

inline std::string sigma_field(const TraceData& t) { return t.baseline ? "" : csv::format_double(t.sigma2); }

}  // namespace detail

/// Writes every report file derived from the traces into `dir`. Output is
/// a pure function of the traces (and the threshold override).
inline ReportFiles write_report(const std::filesystem::path& dir, const std::vector<TraceData>& traces,
                                std::optional<double> threshold_override = std::nullopt) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  ReportFiles files;
  using detail::sigma_field;

  {
    auto out = detail::open_artifact(dir / "site_histograms.csv", "site_histograms", files);
    out << "run,sigma2,site,category,count\n";
    for (const auto& t : traces) {
      const auto h = site_histograms(t);
      for (std::size_t s = 0; s < h.size(); ++s)
        for (std::size_t c = 0; c < h[s].size(); ++c)
          out << t.label << ',' << sigma_field(t) << ',' << t.space.sites()[s].name << ',' << c << ',' << h[s][c]
              << '\n';
    }
  }
  {
    auto out = detail::open_artifact(dir / "r2_series.csv", "r2_series", files);
    out << "run,sigma2,loop,r2\n";
    for (const auto& t : traces)
      for (const auto& rec : t.loops)
        out << t.label << ',' << sigma_field(t) << ',' << rec.loop << ',' << csv::format_double(rec.r2) << '\n';
  }
  {
    auto out = detail::open_artifact(dir / "best_so_far.csv", "best_so_far", files);
    out << "run,sigma2,loop,best\n";
    for (const auto& t : traces) {
      const auto series = best_so_far_series(t);
      for (std::size_t l = 0; l < series.size(); ++l)
        out << t.label << ',' << sigma_field(t) << ',' << (l == 0 ? 0 : t.loops[l - 1].loop) << ','
            << csv::format_double(to_reported(t.orientation, series[l])) << '\n';
    }
  }
  {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& t : traces) {
      for (const auto& row : t.initial) {
        lo = std::min(lo, to_reported(t.orientation, row.y));
        hi = std::max(hi, to_reported(t.orientation, row.y));
      }
      for (const auto& p : added_points(t)) {
        lo = std::min(lo, to_reported(t.orientation, p.y));
        hi = std::max(hi, to_reported(t.orientation, p.y));
      }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double width = (hi - lo) / double(kValueHistogramBins);
    auto bin_of = [&](double v) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      return std::min(b, kValueHistogramBins - 1);
    };
    auto out = detail::open_artifact(dir / "value_histograms.csv", "value_histograms", files);
    out << "run,sigma2,source,bin,lo,hi,count\n";
    for (const auto& t : traces) {
      std::vector<std::size_t> initial(kValueHistogramBins, 0), added(kValueHistogramBins, 0);
      for (const auto& row : t.initial) ++initial[bin_of(to_reported(t.orientation, row.y))];
      for (const auto& p : added_points(t)) ++added[bin_of(to_reported(t.orientation, p.y))];
      for (const auto& [name, counts] : {std::pair{"initial", &initial}, std::pair{"added", &added}})
        for (std::size_t b = 0; b < kValueHistogramBins; ++b)
          out << t.label << ',' << sigma_field(t) << ',' << name << ',' << b << ','
              << csv::format_double(lo + width * double(b)) << ',' << csv::format_double(lo + width * double(b + 1))
              << ',' << (*counts)[b] << '\n';
    }
  }
  for (const auto& t : traces) {
    const double threshold = threshold_override.value_or(t.threshold);
    auto out = detail::open_artifact(dir / ("above_threshold_" + t.label + ".csv"), "above_threshold", files);
    for (const auto& s : t.space.sites()) out << s.name << ',';
    out << "y,loop\n";
    for (const auto& row : above_threshold(t, threshold)) {
      for (auto c : row.sites) out << c << ',';
      out << csv::format_double(row.y) << ',' << row.loop << '\n';
    }
  }
  {
    auto out = detail::open_artifact(dir / "summary.csv", "summary", files);
    out << "run,sigma2,loops,evaluations,best_initial,best_final,above_threshold,distinct_site_values,"
           "final_r2,shortfall_loops,complete\n";
    for (const auto& t : traces) {
      const double threshold = threshold_override.value_or(t.threshold);
      const auto series = best_so_far_series(t);
      std::size_t shortfalls = 0;
      bool complete = t.loops.size() == t.loops_planned;
      for (const auto& rec : t.loops) {
        shortfalls += rec.shortfall;
        complete = complete && rec.complete;
      }
      out << t.label << ',' << sigma_field(t) << ',' << t.loops.size() << ',' << added_points(t).size() << ','
          << csv::format_double(to_reported(t.orientation, series.front())) << ','
          << csv::format_double(to_reported(t.orientation, series.back())) << ','
          << above_threshold(t, threshold).size() << ','
          << distinct_site_values(t.space, proposal_points(t.loops)) << ','
          << csv::format_double(t.loops.empty() ? std::nan("") : t.loops.back().r2) << ',' << shortfalls << ','
          << (complete ? 1 : 0) << '\n';
    }
  }
  return files;
}

}  // namespace qbo
