#include "ssb/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ssb/csv.hpp"
#include "ssb/dynamics.hpp"

namespace ssb {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_csv: empty file " + path);
  }
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_csv: malformed cell '" + cell + "' in " +
                                 path);
      }
    }
    if (values.size() != table.columns.size()) {
      throw std::runtime_error("read_csv: ragged row in " + path);
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

struct Frame {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  double px(double x) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return kMarginLeft +
           (x - x_min) / span * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return kHeight - kMarginBottom -
           (y - y_min) / span * (kHeight - kMarginTop - kMarginBottom);
  }
};

void open_svg(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << format_double(kWidth) << "\" height=\"" << format_double(kHeight)
      << "\" viewBox=\"0 0 " << format_double(kWidth) << " "
      << format_double(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << format_double(kWidth / 2.0)
      << "\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"14\">"
      << title << "</text>\n";
}

void draw_axes(std::ofstream& out, const std::string& x_label,
               const std::string& y_label) {
  out << "<line x1=\"" << format_double(kMarginLeft) << "\" y1=\""
      << format_double(kHeight - kMarginBottom) << "\" x2=\""
      << format_double(kWidth - kMarginRight) << "\" y2=\""
      << format_double(kHeight - kMarginBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << format_double(kMarginLeft) << "\" y1=\""
      << format_double(kMarginTop) << "\" x2=\""
      << format_double(kMarginLeft) << "\" y2=\""
      << format_double(kHeight - kMarginBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << format_double(kWidth / 2.0) << "\" y=\""
      << format_double(kHeight - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << format_double(kHeight / 2.0)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
         "transform=\"rotate(-90 18 "
      << format_double(kHeight / 2.0) << ")\">" << y_label << "</text>\n";
}

void close_svg(std::ofstream& out) { out << "</svg>\n"; }

void polyline(std::ofstream& out, const Frame& frame,
              const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color) {
  if (xs.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ' ';
    out << format_double(frame.px(xs[i])) << ','
        << format_double(frame.py(ys[i]));
  }
  out << "\"/>\n";
}

void scatter(std::ofstream& out, const Frame& frame,
             const std::vector<double>& xs, const std::vector<double>& ys,
             const std::string& color) {
  for (size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << format_double(frame.px(xs[i])) << "\" cy=\""
        << format_double(frame.py(ys[i])) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
  }
}

std::string heat_color(double v) {
  // dark blue -> yellow ramp over [0, 1]
  const double c = std::min(1.0, std::max(0.0, v));
  const int r = static_cast<int>(std::lround(255.0 * c));
  const int g = static_cast<int>(std::lround(220.0 * c));
  const int b = static_cast<int>(std::lround(120.0 * (1.0 - c) + 40.0));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return std::string(buf);
}

void plot_trajectory(const std::vector<std::string>& files,
                     std::ofstream& out) {
  open_svg(out, "order parameter trajectory");
  std::vector<double> ts, ops;
  if (!files.empty()) {
    const CsvTable table = read_csv(files.front());
    const int ct = table.column("t");
    const int cop = table.column("op_modulus");
    if (ct < 0 || cop < 0) {
      throw std::runtime_error("trajectory plot: missing t/op_modulus columns");
    }
    for (const auto& row : table.rows) {
      ts.push_back(row[ct]);
      ops.push_back(row[cop]);
    }
  }
  draw_axes(out, "t", "|order parameter|");
  if (!ts.empty()) {
    Frame frame{ts.front(), std::max(ts.back(), ts.front() + 1e-12), 0.0, 1.05};
    polyline(out, frame, ts, ops, "#1f77b4");
  }
  close_svg(out);
}

void plot_collapse(const std::vector<std::string>& files, std::ofstream& out) {
  open_svg(out, "collapse time vs eps*N (log-log)");
  std::vector<double> lx, ly;
  if (!files.empty()) {
    const CsvTable table = read_csv(files.front());
    const int cn = table.column("N");
    const int ce = table.column("epsilon");
    const int cg = table.column("gamma");
    const int ct = table.column("t_collapse");
    const int cr = table.column("reached");
    if (cn < 0 || ce < 0 || cg < 0 || ct < 0 || cr < 0) {
      throw std::runtime_error("collapse plot: missing columns");
    }
    for (const auto& row : table.rows) {
      if (row[cr] == 0.0 || std::abs(row[cg] - 0.5) > 1e-12) continue;
      if (!(row[ct] > 0.0)) continue;
      lx.push_back(std::log10(row[ce] * row[cn]));
      ly.push_back(std::log10(row[ct]));
    }
  }
  draw_axes(out, "log10(eps*N)", "log10(t_collapse)");
  if (!lx.empty()) {
    Frame frame{*std::min_element(lx.begin(), lx.end()) - 0.2,
                *std::max_element(lx.begin(), lx.end()) + 0.2,
                *std::min_element(ly.begin(), ly.end()) - 0.2,
                *std::max_element(ly.begin(), ly.end()) + 0.2};
    scatter(out, frame, lx, ly, "#d62728");
    if (lx.size() >= 4) {
      std::vector<double> xs(lx.size()), ts(ly.size());
      for (size_t i = 0; i < lx.size(); ++i) {
        xs[i] = std::pow(10.0, lx[i]);
        ts[i] = std::pow(10.0, ly[i]);
      }
      const SlopeFit fit = fit_loglog(xs, ts);
      const double ln10 = std::log(10.0);
      auto fit_y = [&](double log10x) {
        return (fit.intercept + fit.slope * log10x * ln10) / ln10;
      };
      polyline(out, frame, {frame.x_min + 0.2, frame.x_max - 0.2},
               {fit_y(frame.x_min + 0.2), fit_y(frame.x_max - 0.2)},
               "#2ca02c");
      out << "<text x=\"" << format_double(kWidth - 220.0)
          << "\" y=\"40\" font-family=\"monospace\" font-size=\"12\">slope = "
          << format_double(fit.slope) << "</text>\n";
    }
  }
  close_svg(out);
}

void plot_limit_scan(const std::vector<std::string>& files,
                     std::ofstream& out) {
  open_svg(out, "equilibrium order parameter over (N, B)");
  std::vector<double> ns, bs, ops;
  if (!files.empty()) {
    const CsvTable table = read_csv(files.front());
    const int cn = table.column("N");
    const int cb = table.column("B");
    const int cop = table.column("op_modulus");
    if (cn < 0 || cb < 0 || cop < 0) {
      throw std::runtime_error("limit-scan plot: missing columns");
    }
    for (const auto& row : table.rows) {
      ns.push_back(row[cn]);
      bs.push_back(row[cb]);
      ops.push_back(row[cop]);
    }
  }
  draw_axes(out, "log10(N)", "log10(B)");
  if (!ns.empty()) {
    std::vector<double> un = ns, ub = bs;
    std::sort(un.begin(), un.end());
    un.erase(std::unique(un.begin(), un.end()), un.end());
    std::sort(ub.begin(), ub.end());
    ub.erase(std::unique(ub.begin(), ub.end()), ub.end());

    auto index_of = [](const std::vector<double>& grid, double v) {
      return static_cast<int>(std::lower_bound(grid.begin(), grid.end(), v) -
                              grid.begin());
    };
    const double cell_w =
        (kWidth - kMarginLeft - kMarginRight) / static_cast<double>(un.size());
    const double cell_h = (kHeight - kMarginTop - kMarginBottom) /
                          static_cast<double>(ub.size());
    for (size_t i = 0; i < ns.size(); ++i) {
      const int xi = index_of(un, ns[i]);
      const int yi = index_of(ub, bs[i]);
      const double x = kMarginLeft + xi * cell_w;
      const double y = kHeight - kMarginBottom - (yi + 1) * cell_h;
      out << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y)
          << "\" width=\"" << format_double(cell_w) << "\" height=\""
          << format_double(cell_h) << "\" fill=\"" << heat_color(ops[i])
          << "\"/>\n";
    }
  }
  close_svg(out);
}

}  // namespace

void emit_plot(const std::vector<std::string>& input_files,
               const std::string& kind, const std::string& output_svg) {
  if (kind != "trajectory" && kind != "collapse" && kind != "limit-scan") {
    throw std::invalid_argument("emit_plot: unknown kind " + kind);
  }
  // write via temp + rename so a failed plot never leaves a corrupt file
  const std::string tmp = output_svg + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + tmp);
    if (kind == "trajectory") {
      plot_trajectory(input_files, out);
    } else if (kind == "collapse") {
      plot_collapse(input_files, out);
    } else {
      plot_limit_scan(input_files, out);
    }
    if (!out) throw std::runtime_error("emit_plot: write failed");
  } catch (...) {
    std::remove(tmp.c_str());
    throw;
  }
  if (std::rename(tmp.c_str(), output_svg.c_str()) != 0) {
    throw std::runtime_error("emit_plot: cannot move plot into place");
  }
}

}  // namespace ssb
