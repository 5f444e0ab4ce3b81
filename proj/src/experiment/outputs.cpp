#include "outputs.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "zdiheat/error.hpp"
#include "zdiheat/experiment.hpp"

namespace zdiheat {
namespace output {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const std::string& path) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  return f;
}

void finish(File& f, const std::string& path) {
  if (std::ferror(f.get()) || std::fclose(f.release()) != 0) {
    fail(ErrorKind::kIo, "error while writing '" + path + "'");
  }
}

void put(std::FILE* f, double v, const std::string& path) {
  if (!std::isfinite(v)) fail(ErrorKind::kIo, "non-finite value while writing '" + path + "'");
  std::fprintf(f, "%.17g", v);
}

const std::array<std::array<double, 3>, 5> kPalette = {{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
}};

std::string color(double s) {
  s = std::clamp(s, 0.0, 1.0) * static_cast<double>(kPalette.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(s), kPalette.size() - 2);
  const double f = s - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(kPalette[i][0] + f * (kPalette[i + 1][0] - kPalette[i][0]))),
                static_cast<int>(std::lround(kPalette[i][1] + f * (kPalette[i + 1][1] - kPalette[i][1]))),
                static_cast<int>(std::lround(kPalette[i][2] + f * (kPalette[i + 1][2] - kPalette[i][2]))));
  return buf;
}

const std::array<const char*, 8> kLineColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_field_csv(const std::string& path, const SimTrajectory& traj) {
  File f = open_for_write(path);
  std::fputs("t,x,z\n", f.get());
  const SpaceTimeGrid& g = traj.grid();
  for (std::size_t k = 0; k < g.nt(); ++k) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      put(f.get(), g.t(k), path);
      std::fputc(',', f.get());
      put(f.get(), g.x(i), path);
      std::fputc(',', f.get());
      put(f.get(), traj.z(k, i), path);
      std::fputc('\n', f.get());
    }
  }
  finish(f, path);
}

void write_controls_csv(const std::string& path, const SpaceTimeGrid& grid,
                        const std::vector<double>& controls, std::size_t m) {
  File f = open_for_write(path);
  std::fputs("t", f.get());
  for (std::size_t j = 0; j < m; ++j) std::fprintf(f.get(), ",u_%zu", j + 1);
  std::fputc('\n', f.get());
  for (std::size_t k = 0; k < grid.nt(); ++k) {
    put(f.get(), grid.t(k), path);
    for (std::size_t j = 0; j < m; ++j) {
      std::fputc(',', f.get());
      put(f.get(), controls[k * m + j], path);
    }
    std::fputc('\n', f.get());
  }
  finish(f, path);
}

void write_errors_csv(const std::string& path, const ErrorTrace& trace) {
  File f = open_for_write(path);
  std::fputs("t", f.get());
  for (std::size_t j = 0; j < trace.m; ++j) std::fprintf(f.get(), ",e_%zu", j + 1);
  std::fputs(",max_abs\n", f.get());
  for (std::size_t k = 0; k < trace.nt; ++k) {
    put(f.get(), trace.times[k], path);
    for (std::size_t j = 0; j < trace.m; ++j) {
      std::fputc(',', f.get());
      put(f.get(), trace.e(k, j), path);
    }
    std::fputc(',', f.get());
    put(f.get(), trace.max_abs(k), path);
    std::fputc('\n', f.get());
  }
  finish(f, path);
}

void write_heatmap_svg(const std::string& path, const SimTrajectory& traj, const std::string& title) {
  const SpaceTimeGrid& g = traj.grid();
  const double left = 60, top = 40, width = 520, height = 300;
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < g.nt(); ++k) {
    for (double v : traj.slice(k)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const std::size_t cols = std::min<std::size_t>(g.nx(), 200);
  const double cw = width / static_cast<double>(cols);
  const double ch = height / static_cast<double>(g.nt());

  File f = open_for_write(path);
  std::fprintf(f.get(),
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"400\" "
               "font-family=\"sans-serif\" font-size=\"12\">\n"
               "<rect width=\"700\" height=\"400\" fill=\"white\"/>\n"
               "<text x=\"%g\" y=\"24\" font-size=\"14\">%s</text>\n",
               left, title.c_str());
  for (std::size_t k = 0; k < g.nt(); ++k) {
    // time increases upwards
    const double y = top + height - static_cast<double>(k + 1) * ch;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = static_cast<double>(c) / static_cast<double>(cols - 1);
      const double v = traj.sample(k, x);
      std::fprintf(f.get(),
                   "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                   left + static_cast<double>(c) * cw, y, cw + 0.3, ch + 0.3,
                   color((v - lo) / span).c_str());
    }
  }
  std::fprintf(f.get(),
               "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n"
               "<text x=\"%g\" y=\"%g\">x = 0</text><text x=\"%g\" y=\"%g\" text-anchor=\"end\">x = 1</text>\n"
               "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">t = 0</text>\n"
               "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">t = %g</text>\n",
               left, top, width, height, left, top + height + 16, left + width, top + height + 16,
               left - 4, top + height, left - 4, top + 10, g.t_end());
  // colour bar with the fixed scale
  const double bx = left + width + 30;
  for (int i = 0; i < 50; ++i) {
    std::fprintf(f.get(), "<rect x=\"%g\" y=\"%.2f\" width=\"16\" height=\"6.2\" fill=\"%s\"/>\n", bx,
                 top + height - (i + 1) * 6.0, color(i / 49.0).c_str());
  }
  std::fprintf(f.get(),
               "<text x=\"%g\" y=\"%g\">max %.4g</text>\n<text x=\"%g\" y=\"%g\">min %.4g</text>\n</svg>\n",
               bx - 10, top - 6, hi, bx - 10, top + height + 16, lo);
  finish(f, path);
}

void write_line_svg(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& xs, const std::vector<Series>& series) {
  const double left = 80, top = 40, width = 480, height = 300;
  double x_lo = xs.empty() ? 0.0 : xs.front(), x_hi = xs.empty() ? 1.0 : xs.back();
  double y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.values) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!(y_hi > y_lo)) {
    y_lo = std::isfinite(y_lo) ? y_lo - 1.0 : -1.0;
    y_hi = y_lo + 2.0;
  }
  if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * width; };
  auto py = [&](double y) { return top + height - (y - y_lo) / (y_hi - y_lo) * height; };

  File f = open_for_write(path);
  std::fprintf(f.get(),
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"400\" "
               "font-family=\"sans-serif\" font-size=\"12\">\n"
               "<rect width=\"700\" height=\"400\" fill=\"white\"/>\n"
               "<text x=\"%g\" y=\"24\" font-size=\"14\">%s</text>\n"
               "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
               left, title.c_str(), left, top, width, height);
  if (y_lo < 0.0 && y_hi > 0.0) {
    std::fprintf(f.get(), "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#bbbbbb\"/>\n",
                 left, py(0.0), left + width, py(0.0));
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::fprintf(f.get(), "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.2\" points=\"",
                 kLineColors[s % kLineColors.size()]);
    for (std::size_t i = 0; i < xs.size() && i < series[s].values.size(); ++i) {
      std::fprintf(f.get(), "%.2f,%.2f ", px(xs[i]), py(series[s].values[i]));
    }
    std::fputs("\"/>\n", f.get());
    if (series.size() <= 16) {
      std::fprintf(f.get(), "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", left + width + 10,
                   top + 12.0 + 14.0 * static_cast<double>(s), kLineColors[s % kLineColors.size()],
                   series[s].label.c_str());
    }
  }
  std::fprintf(f.get(),
               "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.4g</text>\n"
               "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.4g</text>\n"
               "<text x=\"%g\" y=\"%g\">%.4g</text>\n"
               "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.4g</text>\n"
               "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n</svg>\n",
               left - 4, top + 10, y_hi, left - 4, top + height, y_lo, left, top + height + 16, x_lo,
               left + width, top + height + 16, x_hi, left + width / 2, top + height + 32,
               x_label.c_str());
  finish(f, path);
}

}  // namespace output

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read '" + path + "' for checksum");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kIo, "SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace zdiheat
