// Copyright 2026 The rollover-deepc Authors
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

#ifndef RDEEPC_HARNESS_PLOTS_HPP_
#define RDEEPC_HARNESS_PLOTS_HPP_

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/control/controller.hpp"
#include "rdeepc/harness/simulation.hpp"

namespace rdeepc::harness {

namespace fs = std::filesystem;

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

struct LimitLine {
  double value = 0.0;
  std::string label;
};

struct Marker {
  double x = 0.0, y = 0.0;
  std::string text;
};

struct Chart {
  std::string title;
  std::string x_label = "time [s]";
  std::string y_label;
  std::vector<Series> series;
  std::vector<LimitLine> limits;
  std::vector<Marker> markers;
};

namespace detail {

inline const char* palette(size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round-ish tick step for a span.
inline double tick_step(double span, int target = 6) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace detail

/// Renders a line chart as a standalone SVG document.  Output depends only
/// on the chart contents.
inline std::string render_svg(const Chart& c) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  size_t points = 0;
  for (const Series& s : c.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: series '" + s.label + "' is ragged");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("render_svg: nothing to plot in '" + c.title + "'");
  for (const LimitLine& l : c.limits) {
    y0 = std::min(y0, l.value);
    y1 = std::max(y1, l.value);
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  constexpr double W = 900, H = 420, L = 70, R = 170, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      W, H, W, H);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", L + pw / 2,
                     detail::escape(c.title));

  const double xs = detail::tick_step(x1 - x0), ys = detail::tick_step(y1 - y0);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#e5e5e5\"/>\n",
                       sx(t), T, T + ph);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", sx(t), T + ph + 16,
                       std::abs(t) < 1e-12 ? 0.0 : t);
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    svg += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#e5e5e5\"/>\n",
                       sy(t), L, L + pw);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", L - 6, sy(t) + 4,
                       std::abs(t) < 1e-12 ? 0.0 : t);
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                     pw, ph);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", L + pw / 2, H - 12,
                     detail::escape(c.x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">{1}</text>\n",
      T + ph / 2, detail::escape(c.y_label));

  for (const LimitLine& l : c.limits) {
    svg += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n",
        L, sy(l.value), L + pw, sy(l.value));
    if (!l.label.empty()) {
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", L + 4, sy(l.value) - 4,
                         detail::escape(l.label));
    }
  }

  for (size_t k = 0; k < c.series.size(); ++k) {
    const Series& s = c.series[k];
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
    }
    if (!pts.empty()) pts.pop_back();
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.4\"{} points=\"{}\"/>\n",
                       detail::palette(k), s.dashed ? " stroke-dasharray=\"4 3\"" : "", pts);
    const double ly = T + 14 + 18 * static_cast<double>(k);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                       L + pw + 10, ly, L + pw + 34, ly, detail::palette(k),
                       s.dashed ? " stroke-dasharray=\"4 3\"" : "");
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", L + pw + 40, ly + 4, detail::escape(s.label));
  }

  for (const Marker& m : c.markers) {
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n", sx(m.x),
                       sy(m.y));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n", sx(m.x) + 6, sy(m.y) - 6,
                       detail::escape(m.text));
  }
  svg += "</svg>\n";
  return svg;
}

namespace detail {

inline void require_runs(const std::vector<RunLog>& runs) {
  if (runs.empty()) throw std::invalid_argument("plots: no runs given");
  for (const RunLog& r : runs) {
    if (r.ticks.empty()) throw std::invalid_argument("plots: run '" + r.controller + "' has an empty log");
  }
}

template <class F>
Series series_of(const RunLog& r, const std::string& label, F&& f) {
  Series s;
  s.label = label;
  s.x.reserve(r.ticks.size());
  s.y.reserve(r.ticks.size());
  for (const TickRecord& t : r.ticks) {
    s.x.push_back(t.t);
    s.y.push_back(f(t));
  }
  return s;
}

}  // namespace detail

/// LTR of every run against the +-1 lift-off limits; the first sample at or
/// past a limit is marked for each run.
inline Chart ltr_chart(const std::vector<RunLog>& runs, const std::string& title) {
  detail::require_runs(runs);
  Chart c;
  c.title = title;
  c.y_label = "LTR";
  c.limits = {{1.0, "LTR = +1"}, {-1.0, "LTR = -1"}};
  for (const RunLog& r : runs) {
    c.series.push_back(detail::series_of(r, r.controller, [](const TickRecord& t) { return t.ltr; }));
    for (const TickRecord& t : r.ticks) {
      if (std::abs(t.ltr) >= 1.0) {
        c.markers.push_back({t.t, t.ltr, fmt::format("{} t={:.2f} s", r.controller, t.t)});
        break;
      }
    }
  }
  return c;
}

inline Chart speed_chart(const std::vector<RunLog>& runs, const control::Box& input_box, const std::string& title) {
  detail::require_runs(runs);
  Chart c;
  c.title = title;
  c.y_label = "speed [km/h]";
  if (input_box.size() > 1) {
    c.limits = {{input_box.lower[1], "lower bound"}, {input_box.upper[1], "upper bound"}};
  }
  c.series.push_back(
      detail::series_of(runs.front(), "reference", [](const TickRecord& t) { return t.v_ref_kmh; }));
  c.series.back().dashed = true;
  for (const RunLog& r : runs) {
    c.series.push_back(detail::series_of(r, r.controller, [](const TickRecord& t) { return t.vx * 3.6; }));
  }
  return c;
}

/// Applied steering of each run, each overlaid with its own driver reference.
inline Chart steering_chart(const std::vector<RunLog>& runs, const std::string& title) {
  detail::require_runs(runs);
  Chart c;
  c.title = title;
  c.y_label = "steering wheel [deg]";
  for (const RunLog& r : runs) {
    c.series.push_back(detail::series_of(r, r.controller, [](const TickRecord& t) { return t.delta_f_deg; }));
    if (r.controller != "driver") {
      c.series.push_back(
          detail::series_of(r, r.controller + " ref", [](const TickRecord& t) { return t.delta_ref_deg; }));
      c.series.back().dashed = true;
    }
  }
  return c;
}

inline void write_svg(const fs::path& path, const Chart& c) {
  const std::string doc = render_svg(c);  // throws before any file is created
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto out = fmt::output_file(path.string());
  out.print("{}", doc);
}

/// Writes <prefix>_ltr.svg, <prefix>_speed.svg and <prefix>_steering.svg.
inline std::vector<fs::path> emit_plots(const fs::path& dir, const std::string& prefix,
                                        const std::vector<RunLog>& runs, const control::Box& input_box) {
  detail::require_runs(runs);
  const std::vector<std::pair<fs::path, Chart>> charts = {
      {dir / (prefix + "_ltr.svg"), ltr_chart(runs, prefix + ": load transfer ratio")},
      {dir / (prefix + "_speed.svg"), speed_chart(runs, input_box, prefix + ": longitudinal speed")},
      {dir / (prefix + "_steering.svg"), steering_chart(runs, prefix + ": steering wheel")}};
  std::vector<fs::path> out;
  for (const auto& [path, chart] : charts) {
    write_svg(path, chart);
    out.push_back(path);
  }
  return out;
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_PLOTS_HPP_
