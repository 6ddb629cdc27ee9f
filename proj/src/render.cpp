#include "qsaf/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "qsaf/config.hpp"

namespace qsaf {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 60.0;

constexpr double kBandHeight = 18.0;
constexpr double kBandGap = 12.0;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_header_comments(std::ostream& os, const Metadata& meta) {
  os << "# label: " << meta.label << '\n';
  os << "# command: " << meta.command << '\n';
}

void write_svg_open(std::ostream& os, double width, double height, const Metadata& meta) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
     << px(height) << "\" viewBox=\"0 0 " << px(width) << ' ' << px(height) << "\">\n";
  os << "<title>" << xml_escape(meta.label) << "</title>\n";
  os << "<desc>" << xml_escape(meta.command) << "</desc>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << px(width) << "\" height=\"" << px(height)
     << "\" fill=\"white\"/>\n";
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void write_samples_csv(std::ostream& os, std::span<const SamplePoint> samples,
                       const Metadata& meta) {
  write_header_comments(os, meta);
  os << "x,f,error_bound\n";
  for (const SamplePoint& p : samples) {
    os << format_real(p.x) << ',' << format_real(p.value) << ',' << format_real(p.error_bound)
       << '\n';
  }
}

void write_samples_svg(std::ostream& os, std::span<const SamplePoint> samples,
                       const BoundsPair& bounds, const Metadata& meta) {
  const double lo = std::min(0.0, bounds.lower);
  const double hi = std::max(1.0, bounds.upper);
  const double pad = 0.05 * (hi - lo);
  const double y0 = lo - pad;
  const double y1 = hi + pad;
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  auto sx = [&](double x) { return kMargin + plot_w * x; };
  auto sy = [&](double y) { return kHeight - kMargin - plot_h * (y - y0) / (y1 - y0); };

  write_svg_open(os, kWidth, kHeight, meta);
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << px(sx(0)) << "\" y1=\"" << px(sy(y0)) << "\" x2=\"" << px(sx(0))
     << "\" y2=\"" << px(sy(y1)) << "\"/>\n";
  os << "<line x1=\"" << px(sx(0)) << "\" y1=\"" << px(sy(0)) << "\" x2=\"" << px(sx(1))
     << "\" y2=\"" << px(sy(0)) << "\"/>\n";
  os << "</g>\n";

  std::vector<double> ticks{0.0, bounds.lower, 1.0, bounds.upper};
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  os << "<g font-family=\"monospace\" font-size=\"12\">\n";
  for (double t : ticks) {
    os << "<line x1=\"" << px(sx(0) - 5) << "\" y1=\"" << px(sy(t)) << "\" x2=\"" << px(sx(1))
       << "\" y2=\"" << px(sy(t)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";
    os << "<text x=\"" << px(sx(0) - 8) << "\" y=\"" << px(sy(t) + 4)
       << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  for (double t : {0.0, 1.0}) {
    os << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(sy(0)) << "\" x2=\"" << px(sx(t))
       << "\" y2=\"" << px(sy(0) + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(sy(0) + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  os << "</g>\n";

  os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0) os << ' ';
    os << px(sx(samples[i].x)) << ',' << px(sy(samples[i].value));
  }
  os << "\"/>\n</svg>\n";
}

void CantorCsvWriter::begin(const CantorSpec& spec, std::size_t, const Metadata& meta) {
  write_header_comments(os_, meta);
  os_ << "# dimension: " << format_real(spec.dimension) << '\n';
  os_ << "stage,left,right\n";
}

void CantorCsvWriter::interval(const Interval& iv) {
  os_ << stage_ << ',' << format_real(iv.left) << ',' << format_real(iv.right) << '\n';
}

void CantorSvgWriter::begin(const CantorSpec& spec, std::size_t steps, const Metadata& meta) {
  const double height = 2 * kMargin + static_cast<double>(steps + 1) * (kBandHeight + kBandGap);
  write_svg_open(os_, kWidth, height, meta);
  os_ << "<g font-family=\"monospace\" font-size=\"12\">\n";
  os_ << "<text x=\"" << px(kMargin) << "\" y=\"" << px(kMargin - 20)
      << "\">dimension " << tick_label(spec.dimension) << "</text>\n";
  os_ << "</g>\n";
  // stage 0 is the whole unit interval
  stage_begin(0);
  interval({0.0, 1.0});
  stage_end();
}

void CantorSvgWriter::stage_begin(std::size_t t) {
  band_top_ = kMargin + static_cast<double>(t) * (kBandHeight + kBandGap);
  os_ << "<g fill=\"black\">\n";
}

void CantorSvgWriter::interval(const Interval& iv) {
  const double plot_w = kWidth - 2 * kMargin;
  // keep sub-pixel intervals visible
  const double w = std::max(plot_w * (iv.right - iv.left), 0.25);
  os_ << "<rect x=\"" << px(kMargin + plot_w * iv.left) << "\" y=\"" << px(band_top_)
      << "\" width=\"" << px(w) << "\" height=\"" << px(kBandHeight) << "\"/>\n";
}

void CantorSvgWriter::stage_end() { os_ << "</g>\n"; }

void CantorSvgWriter::end() { os_ << "</svg>\n"; }

}  // namespace qsaf
