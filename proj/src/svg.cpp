// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace opaque {

namespace {
constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 32.0;
constexpr double kMarginBottom = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}
}  // namespace

bool svg_disabled() {
  const char* env = std::getenv("OPAQUE_NO_SVG");
  return env != nullptr && std::string(env) == "1";
}

SvgPlot::SvgPlot(double xmin, double xmax, double ymin, double ymax, std::string title,
                 std::string xlabel, std::string ylabel)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), title_(std::move(title)),
      xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {
  if (!(xmax_ > xmin_) || !(ymax_ > ymin_))
    throw std::invalid_argument("svg: empty axis range");
}

double SvgPlot::px(double x) const {
  return kMarginLeft + (x - xmin_) / (xmax_ - xmin_) * (kWidth - kMarginLeft - kMarginRight);
}

double SvgPlot::py(double y) const {
  return kHeight - kMarginBottom -
         (y - ymin_) / (ymax_ - ymin_) * (kHeight - kMarginTop - kMarginBottom);
}

void SvgPlot::add_line(std::span<const double> x, std::span<const double> y,
                       const std::string& color, const std::string& label) {
  body_ += "<path fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" d=\"";
  bool pen_down = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < xmin_ || x[i] > xmax_) {
      pen_down = false;
      continue;
    }
    body_ += pen_down ? "L" : "M";
    body_ += num(px(x[i])) + " " + num(py(std::min(std::max(y[i], ymin_), ymax_))) + " ";
    pen_down = true;
  }
  body_ += "\"/>\n";
  if (!label.empty()) {
    const double ly = kMarginTop + 14.0 * legend_count_++;
    legend_ += "<rect x=\"" + num(kWidth - 150) + "\" y=\"" + num(ly) +
               "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>" +
               "<text x=\"" + num(kWidth - 136) + "\" y=\"" + num(ly + 9) +
               "\" font-size=\"11\">" + label + "</text>\n";
  }
}

void SvgPlot::add_points(std::span<const double> x, std::span<const double> y,
                         const std::string& color, double radius,
                         const std::string& label) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < xmin_ || x[i] > xmax_ || y[i] < ymin_ || y[i] > ymax_) continue;
    body_ += "<circle cx=\"" + num(px(x[i])) + "\" cy=\"" + num(py(y[i])) + "\" r=\"" +
             num(radius) + "\" fill=\"" + color + "\" fill-opacity=\"0.5\"/>\n";
  }
  if (!label.empty()) {
    const double ly = kMarginTop + 14.0 * legend_count_++;
    legend_ += "<circle cx=\"" + num(kWidth - 145) + "\" cy=\"" + num(ly + 5) +
               "\" r=\"4\" fill=\"" + color + "\"/><text x=\"" + num(kWidth - 136) +
               "\" y=\"" + num(ly + 9) + "\" font-size=\"11\">" + label + "</text>\n";
  }
}

void SvgPlot::add_diagonal(const std::string& color) {
  const double lo = std::max(xmin_, ymin_);
  const double hi = std::min(xmax_, ymax_);
  if (!(hi > lo)) return;
  body_ += "<line x1=\"" + num(px(lo)) + "\" y1=\"" + num(py(lo)) + "\" x2=\"" +
           num(px(hi)) + "\" y2=\"" + num(py(hi)) + "\" stroke=\"" + color +
           "\" stroke-dasharray=\"4 3\"/>\n";
}

std::string SvgPlot::to_string() const {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
         num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kHeight - kMarginBottom) +
         "\" x2=\"" + num(kWidth - kMarginRight) + "\" y2=\"" +
         num(kHeight - kMarginBottom) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" +
         num(kMarginLeft) + "\" y2=\"" + num(kHeight - kMarginBottom) +
         "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin_ + (xmax_ - xmin_) * t / 4.0;
    const double yv = ymin_ + (ymax_ - ymin_) * t / 4.0;
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kHeight - kMarginBottom + 16) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    out += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(py(yv) + 3) +
           "\" font-size=\"10\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  if (!title_.empty())
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kMarginTop - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + title_ + "</text>\n";
  if (!xlabel_.empty())
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 10) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + xlabel_ + "</text>\n";
  if (!ylabel_.empty())
    out += "<text x=\"14\" y=\"" + num(kHeight / 2) +
           "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(kHeight / 2) + ")\">" + ylabel_ + "</text>\n";
  out += body_;
  out += legend_;
  out += "</svg>\n";
  return out;
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << to_string();
}

}  // namespace opaque
