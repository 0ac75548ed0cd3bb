#include "ckrr/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ckrr/errors.hpp"

namespace ckrr {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "axis,value,train_mse,test_mse,test_mse_ci95,c_con,c_con_ci95,reps\n";
  for (const auto& r : result.rows) {
    out << r.axis << ',' << format_number(r.value) << ','
        << format_number(r.train_mse) << ',' << format_number(r.test_mse) << ','
        << format_number(r.test_mse_ci95) << ',' << format_number(r.c_con) << ','
        << format_number(r.c_con_ci95) << ',' << r.reps << "\n";
  }
  return out.str();
}

namespace {

struct Series {
  std::vector<double> x, y, ci;
};

const char* kPalette[] = {"#1f6fb2", "#c2452d", "#3a8f4e", "#8755a8",
                          "#b08a17", "#40858f"};

}  // namespace

std::string render_sweep_svg(const SweepResult& result) {
  // Group rows by axis label; each group becomes one curve.
  std::vector<std::string> order;
  std::map<std::string, Series> series;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& r : result.rows) {
    if (r.reps == 0 || std::isnan(r.test_mse)) continue;
    if (series.find(r.axis) == series.end()) order.push_back(r.axis);
    Series& s = series[r.axis];
    s.x.push_back(r.value);
    s.y.push_back(r.test_mse);
    s.ci.push_back(std::isnan(r.test_mse_ci95) ? 0.0 : r.test_mse_ci95);
    const double lo = r.test_mse - s.ci.back();
    const double hi = r.test_mse + s.ci.back();
    if (first) {
      xmin = xmax = r.value;
      ymin = lo;
      ymax = hi;
      first = false;
    } else {
      xmin = std::min(xmin, r.value);
      xmax = std::max(xmax, r.value);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  const double w = 640, h = 440, ml = 70, mr = 20, mt = 20, mb = 50;
  const auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  const auto py = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << (h - mb) << "\" x2=\"" << (w - mr)
      << "\" y2=\"" << (h - mb) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << (h - mb) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4.0;
    const double yv = ymin + t * (ymax - ymin) / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << (h - mb + 20)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_number(xv)
        << "</text>\n"
        << "<text x=\"" << (ml - 8) << "\" y=\"" << (py(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(yv)
        << "</text>\n";
  }

  int color = 0;
  for (const auto& label : order) {
    const Series& s = series[label];
    const char* c = kPalette[color % 6];
    if (s.x.size() > 1) {
      out << "<polygon fill=\"" << c << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << px(s.x[i]) << "," << py(s.y[i] + s.ci[i]) << " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << px(s.x[i]) << "," << py(s.y[i] - s.ci[i]) << " ";
      }
      out << "\"/>\n<polyline fill=\"none\" stroke=\"" << c
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << px(s.x[i]) << "," << py(s.y[i]) << " ";
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
          << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    }
    out << "<text x=\"" << (w - mr - 6) << "\" y=\"" << (mt + 16 + 14 * color)
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << c << "\">" << label
        << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

void emit_outputs(const SweepResult& result, const std::string& csv_path,
                  const std::string& svg_path) {
  write_text_file(csv_path, format_sweep_csv(result));
  if (!svg_path.empty() && !result.rows.empty()) {
    write_text_file(svg_path, render_sweep_svg(result));
  }
}

}  // namespace ckrr
