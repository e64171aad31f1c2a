#include "hotspot/render.hpp"
#include "hotspot/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hotspot {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  // Avoid "-0.00".
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

void open_svg(std::ostringstream& out, const FigureSpec& spec, std::string_view kind, std::string_view extra = {}) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" data-kind=\"" << kind << '"' << extra
      << ">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty()) {
    out << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"" << fmt(spec.margin_top / 2.0 + 5)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << escape(spec.title)
        << "</text>\n";
  }
}

void axes(std::ostringstream& out, const PlotArea& a, const std::string& x_label, const std::string& y_label) {
  out << "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(a.x0) << "\" y1=\"" << fmt(a.y1) << "\" x2=\"" << fmt(a.x1) << "\" y2=\"" << fmt(a.y1)
      << "\"/>\n"
      << "<line x1=\"" << fmt(a.x0) << "\" y1=\"" << fmt(a.y0) << "\" x2=\"" << fmt(a.x0) << "\" y2=\"" << fmt(a.y1)
      << "\"/>\n"
      << "</g>\n";
  out << "<text class=\"xlabel\" x=\"" << fmt((a.x0 + a.x1) / 2) << "\" y=\"" << fmt(a.y1 + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(x_label) << "</text>\n";
  const double ym = (a.y0 + a.y1) / 2;
  const double yx = a.x0 - 50;
  out << "<text class=\"ylabel\" x=\"" << fmt(yx) << "\" y=\"" << fmt(ym)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 " << fmt(yx)
      << ' ' << fmt(ym) << ")\">" << escape(y_label) << "</text>\n";
}

void geo_ticks(std::ostringstream& out, const BoundingBox& bbox, const PlotArea& a) {
  out << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double x = a.x0 + f * (a.x1 - a.x0);
    const double y = a.y1 - f * (a.y1 - a.y0);
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(a.y1 + 16) << "\" text-anchor=\"middle\">"
        << fmt(bbox.min.lon + f * bbox.lon_span()) << "</text>\n";
    out << "<text x=\"" << fmt(a.x0 - 6) << "\" y=\"" << fmt(y + 3) << "\" text-anchor=\"end\">"
        << fmt(bbox.min.lat + f * bbox.lat_span()) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb parse_hex_color(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') throw Error(ErrorCode::InvalidArgument, "colour must be #rrggbb");
  auto nibble = [&](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw Error(ErrorCode::InvalidArgument, "colour must be #rrggbb");
  };
  auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(nibble(text[i]) * 16 + nibble(text[i + 1])); };
  return {byte(1), byte(3), byte(5)};
}

void validate(const FigureSpec& spec) {
  if (spec.width < 64 || spec.height < 64) throw Error(ErrorCode::InvalidArgument, "figure must be at least 64x64");
  if (spec.ramp.empty()) throw Error(ErrorCode::InvalidArgument, "colour ramp needs at least one stop");
  if (spec.margin_left < 0 || spec.margin_right < 0 || spec.margin_top < 0 || spec.margin_bottom < 0 ||
      spec.margin_left + spec.margin_right >= spec.width || spec.margin_top + spec.margin_bottom >= spec.height) {
    throw Error(ErrorCode::InvalidArgument, "margins leave no plot area");
  }
}

PlotArea plot_area(const FigureSpec& spec) {
  return {static_cast<double>(spec.margin_left), static_cast<double>(spec.margin_top),
          static_cast<double>(spec.width - spec.margin_right), static_cast<double>(spec.height - spec.margin_bottom)};
}

std::pair<double, double> project(const GeoPoint& p, const BoundingBox& bbox, const PlotArea& a) {
  const double fx = (p.lon - bbox.min.lon) / bbox.lon_span();
  const double fy = (p.lat - bbox.min.lat) / bbox.lat_span();
  return {a.x0 + fx * (a.x1 - a.x0), a.y1 - fy * (a.y1 - a.y0)};
}

Rgb ramp_color(std::span<const Rgb> ramp, double t) {
  if (ramp.empty()) throw Error(ErrorCode::InvalidArgument, "colour ramp needs at least one stop");
  if (ramp.size() == 1) return ramp[0];
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * static_cast<double>(ramp.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(pos), ramp.size() - 2);
  const double f = pos - static_cast<double>(i);
  auto lerp = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * f));
  };
  return {lerp(ramp[i].r, ramp[i + 1].r), lerp(ramp[i].g, ramp[i + 1].g), lerp(ramp[i].b, ramp[i + 1].b)};
}

double heat_parameter(int count, int min_count, int max_count) {
  if (max_count == min_count) return 0.0;
  return static_cast<double>(count - min_count) / static_cast<double>(max_count - min_count);
}

std::string render_scatter(std::span<const GeoPoint> points, const BoundingBox& bbox, const FigureSpec& spec) {
  validate(spec);
  const PlotArea a = plot_area(spec);
  std::size_t clipped = 0;
  for (const auto& p : points) clipped += !bbox.contains(p);

  std::ostringstream out;
  open_svg(out, spec, "scatter",
           " data-points=\"" + std::to_string(points.size() - clipped) + "\" data-clipped=\"" +
               std::to_string(clipped) + '"');
  axes(out, a, spec.x_label, spec.y_label);
  geo_ticks(out, bbox, a);
  const std::string colour = to_hex(spec.ramp.front());
  out << "<g class=\"markers\" fill=\"" << colour << "\" fill-opacity=\"0.6\">\n";
  for (const auto& p : points) {
    if (!bbox.contains(p)) continue;
    const auto [x, y] = project(p, bbox, a);
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"2\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_grid_heatmap(const CellCounts& counts, const FigureSpec& spec) {
  validate(spec);
  const GridSpec& g = counts.grid;
  if (counts.counts.size() != static_cast<std::size_t>(g.cell_count())) {
    throw Error(ErrorCode::InvalidArgument, "count vector does not match the grid");
  }
  const PlotArea a = plot_area(spec);
  const auto [lo, hi] = std::minmax_element(counts.counts.begin(), counts.counts.end());
  const int min_count = *lo;
  const int max_count = *hi;
  const double cw = (a.x1 - a.x0) / g.cols;
  const double ch = (a.y1 - a.y0) / g.rows;

  std::ostringstream out;
  open_svg(out, spec, "heatmap",
           " data-rows=\"" + std::to_string(g.rows) + "\" data-cols=\"" + std::to_string(g.cols) + "\" data-min=\"" +
               std::to_string(min_count) + "\" data-max=\"" + std::to_string(max_count) + '"');
  out << "<g class=\"cells\" stroke=\"#ffffff\" stroke-width=\"0.5\">\n";
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const int count = counts.at({r, c});
      const double t = heat_parameter(count, min_count, max_count);
      // Row 0 is the southern edge.
      out << "<rect x=\"" << fmt(a.x0 + c * cw) << "\" y=\"" << fmt(a.y1 - (r + 1) * ch) << "\" width=\"" << fmt(cw)
          << "\" height=\"" << fmt(ch) << "\" fill=\"" << to_hex(ramp_color(spec.ramp, t)) << "\" data-row=\"" << r
          << "\" data-col=\"" << c << "\" data-count=\"" << count << "\" data-t=\"" << fmt(t) << "\"/>\n";
    }
  }
  out << "</g>\n";
  axes(out, a, spec.x_label, spec.y_label);
  geo_ticks(out, g.bbox, a);
  const double ly = a.y1 + 46;
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect x=\"" << fmt(a.x1 - 150) << "\" y=\"" << fmt(ly) << "\" width=\"10\" height=\"10\" fill=\""
      << to_hex(ramp_color(spec.ramp, 0.0)) << "\"/>\n"
      << "<text x=\"" << fmt(a.x1 - 136) << "\" y=\"" << fmt(ly + 9) << "\">min " << min_count << "</text>\n"
      << "<rect x=\"" << fmt(a.x1 - 70) << "\" y=\"" << fmt(ly) << "\" width=\"10\" height=\"10\" fill=\""
      << to_hex(ramp_color(spec.ramp, 1.0)) << "\"/>\n"
      << "<text x=\"" << fmt(a.x1 - 56) << "\" y=\"" << fmt(ly + 9) << "\">max " << max_count << "</text>\n"
      << "</g>\n</svg>\n";
  return out.str();
}

std::string render_importance(const ImportanceReport& report, const FigureSpec& spec) {
  validate(spec);
  if (report.feature_names.size() != report.importance.size()) {
    throw Error(ErrorCode::InvalidArgument, "importance report is inconsistent");
  }
  FigureSpec s = spec;
  s.margin_left = std::max(s.margin_left, 140);
  validate(s);
  const PlotArea a = plot_area(s);

  std::vector<std::size_t> order(report.importance.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return report.importance[x] > report.importance[y]; });
  const double max_value = report.importance.empty() ? 0.0 : report.importance[order.front()];
  const double band = order.empty() ? 0.0 : (a.y1 - a.y0) / static_cast<double>(order.size());
  const double width = a.x1 - a.x0;

  std::ostringstream out;
  open_svg(out, s, "importance", " data-bars=\"" + std::to_string(order.size()) + '"');
  out << "<g class=\"bars\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const std::string colour = to_hex(spec.ramp.back());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    const double v = report.importance[i];
    const double len = max_value > 0.0 ? v / max_value * width : 0.0;
    const double y = a.y0 + k * band + 0.15 * band;
    out << "<rect x=\"" << fmt(a.x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(len) << "\" height=\""
        << fmt(0.7 * band) << "\" fill=\"" << colour << "\" stroke=\"#333333\" stroke-width=\"0.5\" data-feature=\""
        << escape(report.feature_names[i]) << "\" data-value=\"" << fmt(v) << "\"/>\n";
    out << "<text x=\"" << fmt(a.x0 - 6) << "\" y=\"" << fmt(y + 0.35 * band + 4) << "\" text-anchor=\"end\">"
        << escape(report.feature_names[i]) << "</text>\n";
  }
  out << "</g>\n";
  axes(out, a, "relative importance", "feature");
  out << "</svg>\n";
  return out.str();
}

std::string render_grid_heatmap_ppm(const CellCounts& counts, const FigureSpec& spec) {
  validate(spec);
  const GridSpec& g = counts.grid;
  if (counts.counts.size() != static_cast<std::size_t>(g.cell_count())) {
    throw Error(ErrorCode::InvalidArgument, "count vector does not match the grid");
  }
  const auto [lo, hi] = std::minmax_element(counts.counts.begin(), counts.counts.end());
  std::string out = "P6\n" + std::to_string(spec.width) + ' ' + std::to_string(spec.height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height) * 3);
  for (int y = 0; y < spec.height; ++y) {
    // Top pixel row is the northern edge.
    const int r = std::min(g.rows - 1, (spec.height - 1 - y) * g.rows / spec.height);
    for (int x = 0; x < spec.width; ++x) {
      const int c = std::min(g.cols - 1, x * g.cols / spec.width);
      const Rgb colour = ramp_color(spec.ramp, heat_parameter(counts.at({r, c}), *lo, *hi));
      out += static_cast<char>(colour.r);
      out += static_cast<char>(colour.g);
      out += static_cast<char>(colour.b);
    }
  }
  return out;
}

}  // namespace hotspot
