#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "evgrow/numerics.hpp"

namespace evgrow {

// Small self-contained SVG line-plot writer; no plotting dependency. All
// coordinates are emitted with fixed precision so output is byte-stable.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x,
            bool log_y)
        : title_(std::move(title)),
          x_label_(std::move(x_label)),
          y_label_(std::move(y_label)),
          log_x_(log_x),
          log_y_(log_y) {}

    void add_series(std::string label, std::string color,
                    std::vector<std::pair<double, double>> points) {
        for (auto& [x, y] : points) {
            x = log_x_ ? std::log10(x) : x;
            y = log_y_ ? std::log10(y) : y;
        }
        points.erase(std::remove_if(points.begin(), points.end(),
                                    [](const auto& p) {
                                        return !std::isfinite(p.first) ||
                                               !std::isfinite(p.second);
                                    }),
                     points.end());
        series_.push_back({std::move(label), std::move(color), std::move(points)});
    }

    void annotate(std::string text) { notes_.push_back(std::move(text)); }

    std::string render() const {
        const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
        double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf;
        for (const auto& s : series_)
            for (const auto& [x, y] : s.points) {
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        if (!(x_lo < x_hi)) x_hi = x_lo + 1.0;
        if (!(y_lo < y_hi)) y_hi = y_lo + 1.0;
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
        auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
        auto py = [&](double y) {
            return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb);
        };
        std::string out;
        char buf[256];
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
               "viewBox=\"0 0 640 420\">\n";
        out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"320\" y=\"22\" text-anchor=\"middle\" "
                      "font-size=\"15\">%s</text>\n",
                      title_.c_str());
        out += buf;
        // axes
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                      "stroke=\"black\"/>\n",
                      ml, H - mb, W - mr, H - mb);
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                      "stroke=\"black\"/>\n",
                      ml, mt, ml, H - mb);
        out += buf;
        // ticks
        for (int i = 0; i <= 4; ++i) {
            const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
            const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
                          "font-size=\"11\">%s%.4g</text>\n",
                          px(xv), H - mb + 18, log_x_ ? "1e" : "", xv);
            out += buf;
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" "
                          "font-size=\"11\">%s%.4g</text>\n",
                          ml - 6, py(yv) + 4, log_y_ ? "1e" : "", yv);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
                      "font-size=\"13\">%s</text>\n",
                      (ml + W - mr) / 2, H - 12, x_label_.c_str());
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"18\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"13\" "
                      "transform=\"rotate(-90 18 %.2f)\">%s</text>\n",
                      (mt + H - mb) / 2, (mt + H - mb) / 2, y_label_.c_str());
        out += buf;
        // series
        int li = 0;
        for (const auto& s : series_) {
            std::string path;
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%s%.3f,%.3f", i ? " " : "",
                              px(s.points[i].first), py(s.points[i].second));
                path += buf;
            }
            std::snprintf(buf, sizeof(buf),
                          "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.7\" "
                          "points=\"%s\"/>\n",
                          s.color.c_str(), path.c_str());
            out += buf;
            for (const auto& [x, y] : s.points) {
                std::snprintf(buf, sizeof(buf),
                              "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.4\" fill=\"%s\"/>\n",
                              px(x), py(y), s.color.c_str());
                out += buf;
            }
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                          "fill=\"%s\">%s</text>\n",
                          W - mr - 150.0, mt + 16.0 + 16.0 * li, s.color.c_str(),
                          s.label.c_str());
            out += buf;
            ++li;
        }
        for (std::size_t i = 0; i < notes_.size(); ++i) {
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%s</text>\n",
                          ml + 10.0, mt + 16.0 + 16.0 * i, notes_[i].c_str());
            out += buf;
        }
        out += "</svg>\n";
        return out;
    }

  private:
    struct Series {
        std::string label, color;
        std::vector<std::pair<double, double>> points;
    };
    std::string title_, x_label_, y_label_;
    bool log_x_, log_y_;
    std::vector<Series> series_;
    std::vector<std::string> notes_;
};

}  // namespace evgrow
