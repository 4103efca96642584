#include "svg.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "output.hpp"

namespace geophase::cli {

namespace {

constexpr double kWidth = 760;
constexpr double kHeight = 460;
constexpr double kLeft = 80;
constexpr double kRight = 210;
constexpr double kTop = 46;
constexpr double kBottom = 58;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(0.5, 0.05 * std::abs(hi));
    return {lo - pad, hi + pad};
  }
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::vector<double> nice_ticks(Range r, int target = 6) {
  const double raw = (r.hi - r.lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  std::vector<double> ticks;
  for (double k = std::ceil(r.lo / step); k * step <= r.hi + 1e-9 * step; k += 1.0) {
    ticks.push_back(k * step);
  }
  return ticks;
}

class Frame {
 public:
  Frame(Range x, Range y) : x_(x), y_(y) {}
  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  std::string axes(const std::string& title, const std::string& xl, const std::string& yl) const {
    std::string s;
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (double t : nice_ticks(x_)) {
      const double p = px(t);
      s += "<line x1=\"" + num(p) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(p) + "\" y2=\"" + num(y0 + 5) +
           "\" stroke=\"#000\"/>\n";
      s += "<text x=\"" + num(p) + "\" y=\"" + num(y0 + 19) + "\" text-anchor=\"middle\">" + tick_text(t) +
           "</text>\n";
    }
    for (double t : nice_ticks(y_)) {
      const double p = py(t);
      s += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(p) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(p) +
           "\" stroke=\"#000\"/>\n";
      s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(p + 4) + "\" text-anchor=\"end\">" + tick_text(t) +
           "</text>\n";
    }
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 14) + "\" text-anchor=\"middle\">" +
         escape(xl) + "</text>\n";
    s += "<text transform=\"translate(18," + num((y0 + y1) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(yl) + "</text>\n";
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"26\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";
    return s;
  }

 private:
  Range x_;
  Range y_;
};

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

std::string dash_for(Stroke s) {
  switch (s) {
    case Stroke::dashdot: return " stroke-dasharray=\"9,4,2,4\"";
    default: return "";
  }
}

// anchors of a perceptually ordered dark-to-light map
constexpr std::array<std::array<double, 3>, 5> kMap{{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
constexpr std::array<unsigned char, 3> kInvalid{92, 26, 11};

std::array<unsigned char, 3> colour(double u) {
  u = std::clamp(u, 0.0, 1.0) * (kMap.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), kMap.size() - 2);
  const double w = u - static_cast<double>(i);
  std::array<unsigned char, 3> out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<unsigned char>(std::lround((1 - w) * kMap[i][c] + w * kMap[i + 1][c]));
  }
  return out;
}

void put_be32(std::string& s, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) s += static_cast<char>((v >> shift) & 0xff);
}

void put_chunk(std::string& png, const char* type, const std::string& data) {
  put_be32(png, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  png += body;
  put_be32(png, static_cast<std::uint32_t>(
                    crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(int width, int height, const std::vector<unsigned char>& rgb) {
  if (width <= 0 || height <= 0 || rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw std::invalid_argument("png: bad image size");
  }
  std::string raw;
  raw.reserve(static_cast<std::size_t>(height) * (3 * width + 1));
  for (int r = 0; r < height; ++r) {
    raw += '\0';  // filter: none
    raw.append(reinterpret_cast<const char*>(rgb.data()) + static_cast<std::size_t>(r) * 3 * width,
               static_cast<std::size_t>(3 * width));
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw std::runtime_error("png: zlib compression failed");
  }
  packed.resize(packed_size);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", packed);
  put_chunk(png, "IEND", "");
  return png;
}

std::string render_line_plot(const LinePlot& plot) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  const Frame frame(padded(xlo, xhi), padded(ylo, yhi));
  std::string svg = header();
  svg += frame.axes(plot.title, plot.x_label, plot.y_label);

  for (double g : plot.guides) {
    const double p = frame.px(g);
    svg += "<line x1=\"" + num(p) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(p) + "\" y2=\"" +
           num(kHeight - kBottom) + "\" stroke=\"#666\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (const auto& s : plot.series) {
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               (s.stroke == Stroke::markers ? "1" : "1.6") + "\"" + dash_for(s.stroke) + " points=\"" +
               points + "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(frame.px(s.x[i])) + "," + num(frame.py(s.y[i]));
    }
    flush();
    if (s.stroke == Stroke::markers) {
      const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 40);
      for (std::size_t i = 0; i < s.x.size(); i += stride) {
        if (!std::isfinite(s.y[i])) continue;
        svg += "<circle cx=\"" + num(frame.px(s.x[i])) + "\" cy=\"" + num(frame.py(s.y[i])) +
               "\" r=\"3\" fill=\"none\" stroke=\"" + s.color + "\"/>\n";
      }
    }
  }

  double ly = kTop + 10;
  const double lx = kWidth - kRight + 14;
  for (const auto& s : plot.series) {
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 28) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"" + dash_for(s.stroke) + "/>\n";
    if (s.stroke == Stroke::markers) {
      svg += "<circle cx=\"" + num(lx + 14) + "\" cy=\"" + num(ly) + "\" r=\"3\" fill=\"none\" stroke=\"" +
             s.color + "\"/>\n";
    }
    svg += "<text x=\"" + num(lx + 34) + "\" y=\"" + num(ly + 4) + "\">" + escape(s.label) + "</text>\n";
    ly += 18;
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_density_plot(const DensityPlot& plot) {
  const std::size_t cells = static_cast<std::size_t>(plot.nx) * plot.ny;
  if (plot.nx <= 0 || plot.ny <= 0 || plot.values.size() != cells || plot.valid.size() != cells) {
    throw std::invalid_argument("density plot: bad grid size");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < cells; ++i) {
    if (!plot.valid[i] || !std::isfinite(plot.values[i])) continue;
    lo = std::min(lo, plot.values[i]);
    hi = std::max(hi, plot.values[i]);
  }
  const bool any = lo <= hi;
  const double span = any && hi > lo ? hi - lo : 1.0;

  std::vector<unsigned char> rgb(cells * 3);
  for (int r = 0; r < plot.ny; ++r) {
    const int row = plot.ny - 1 - r;  // image rows run top to bottom
    for (int c = 0; c < plot.nx; ++c) {
      const std::size_t k = static_cast<std::size_t>(row) * plot.nx + c;
      const bool ok = plot.valid[k] && std::isfinite(plot.values[k]);
      const auto px = ok ? colour((plot.values[k] - lo) / span) : kInvalid;
      std::copy(px.begin(), px.end(), rgb.begin() + 3 * (static_cast<std::size_t>(r) * plot.nx + c));
    }
  }

  // pixels are centred on the grid points
  const double hx = plot.nx > 1 ? 0.5 * (plot.x_max - plot.x_min) / (plot.nx - 1) : 0.5;
  const double hy = plot.ny > 1 ? 0.5 * (plot.y_max - plot.y_min) / (plot.ny - 1) : 0.5;
  const Frame frame({plot.x_min - hx, plot.x_max + hx}, {plot.y_min - hy, plot.y_max + hy});
  std::string svg = header();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  svg += "<image x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(y0 - y1) + "\" preserveAspectRatio=\"none\" style=\"image-rendering:pixelated\" href=\"data:image/png;base64," +
         base64(encode_png(plot.nx, plot.ny, rgb)) + "\"/>\n";
  svg += frame.axes(plot.title, plot.x_label, plot.y_label);

  std::vector<unsigned char> bar(3 * 128);
  for (int r = 0; r < 128; ++r) {
    const auto px = colour(1.0 - r / 127.0);
    std::copy(px.begin(), px.end(), bar.begin() + 3 * r);
  }
  const double bx = x1 + 24;
  svg += "<image x=\"" + num(bx) + "\" y=\"" + num(y1) + "\" width=\"18\" height=\"" + num(y0 - y1) +
         "\" preserveAspectRatio=\"none\" href=\"data:image/png;base64," + base64(encode_png(1, 128, bar)) +
         "\"/>\n";
  svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(y1) + "\" width=\"18\" height=\"" + num(y0 - y1) +
         "\" fill=\"none\" stroke=\"#000\"/>\n";
  svg += "<text x=\"" + num(bx + 24) + "\" y=\"" + num(y1 + 10) + "\">" + (any ? tick_text(hi) : "n/a") +
         "</text>\n";
  svg += "<text x=\"" + num(bx + 24) + "\" y=\"" + num(y0) + "\">" + (any ? tick_text(lo) : "n/a") +
         "</text>\n";
  const bool has_invalid = std::find(plot.valid.begin(), plot.valid.end(), false) != plot.valid.end();
  if (has_invalid) {
    svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(y0 + 14) + "\" width=\"12\" height=\"12\" fill=\"rgb(92,26,11)\"/>\n";
    svg += "<text x=\"" + num(bx + 16) + "\" y=\"" + num(y0 + 24) + "\">invalid</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace geophase::cli
