// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_SVG_HPP
#define OPAQUE_SVG_HPP

#include <span>
#include <string>

namespace opaque {

/// Minimal line/scatter plot writer built from raw SVG path elements.
/// Canonical output stays CSV; these files are advisory visual aids.
class SvgPlot {
 public:
  SvgPlot(double xmin, double xmax, double ymin, double ymax,
          std::string title = "", std::string xlabel = "", std::string ylabel = "");

  void add_line(std::span<const double> x, std::span<const double> y,
                const std::string& color, const std::string& label = "");
  void add_points(std::span<const double> x, std::span<const double> y,
                  const std::string& color, double radius = 2.0,
                  const std::string& label = "");
  void add_diagonal(const std::string& color);

  std::string to_string() const;
  void write(const std::string& path) const;

 private:
  double px(double x) const;
  double py(double y) const;

  double xmin_, xmax_, ymin_, ymax_;
  std::string title_, xlabel_, ylabel_;
  std::string body_;
  std::string legend_;
  int legend_count_ = 0;
};

/// True when the OPAQUE_NO_SVG environment variable disables SVG emission.
bool svg_disabled();

}  // namespace opaque

#endif  // OPAQUE_SVG_HPP
