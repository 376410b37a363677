#include "walkbsde/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace walkbsde {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string emit_plot(const RateFit& fit, double reference_slope, const std::string& title) {
    if (fit.points.empty()) throw std::invalid_argument("no data to plot");

    const double width = 640.0, height = 480.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;

    double lx_min = std::log10(fit.points.front().first);
    double lx_max = lx_min, ly_min = std::log10(fit.points.front().second);
    double ly_max = ly_min;
    for (const auto& [n, e] : fit.points) {
        lx_min = std::min(lx_min, std::log10(n));
        lx_max = std::max(lx_max, std::log10(n));
        ly_min = std::min(ly_min, std::log10(e));
        ly_max = std::max(ly_max, std::log10(e));
    }
    if (lx_max - lx_min < 1e-9) lx_max = lx_min + 1.0;
    if (ly_max - ly_min < 1e-9) ly_max = ly_min + 1.0;
    double pad = 0.05 * (ly_max - ly_min);
    ly_min -= pad;
    ly_max += pad;

    auto px = [&](double lx) { return ml + (lx - lx_min) / (lx_max - lx_min) * (width - ml - mr); };
    auto py = [&](double ly) {
        return height - mb - (ly - ly_min) / (ly_max - ly_min) * (height - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" + title + "</text>\n";
    // axes
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(height - mb) + "\" x2=\"" + num(width - mr) +
           "\" y2=\"" + num(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
           num(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(0.5 * (ml + width - mr)) + "\" y=\"" + num(height - 14.0) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">log10 n"
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(0.5 * (mt + height - mb)) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 " + num(0.5 * (mt + height - mb)) + ")\">log10 error"
           "</text>\n";

    // reference line of the proven slope through the first point
    {
        double x0 = std::log10(fit.points.front().first);
        double y0 = std::log10(fit.points.front().second);
        double y_at = [&](double lx) { return y0 + reference_slope * (lx - x0); }(lx_max);
        svg += "<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) + "\" x2=\"" +
               num(px(lx_max)) + "\" y2=\"" + num(py(y_at)) +
               "\" stroke=\"#999999\" stroke-dasharray=\"6,4\"/>\n";
        svg += "<text x=\"" + num(px(lx_max) - 4.0) + "\" y=\"" + num(py(y_at) - 6.0) +
               "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" "
               "fill=\"#777777\">slope " + num(reference_slope) + "</text>\n";
    }

    // fitted line
    if (fit.fitted && fit.points.size() >= 2) {
        double ln10 = std::log(10.0);
        auto fit_ly = [&](double lx) {
            return (fit.intercept + fit.slope * lx * ln10) / ln10;
        };
        svg += "<line x1=\"" + num(px(lx_min)) + "\" y1=\"" + num(py(fit_ly(lx_min))) +
               "\" x2=\"" + num(px(lx_max)) + "\" y2=\"" + num(py(fit_ly(lx_max))) +
               "\" stroke=\"#1f77b4\"/>\n";
        svg += "<text x=\"" + num(ml + 8.0) + "\" y=\"" + num(mt + 14.0) +
               "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#1f77b4\">fit slope " +
               num(fit.slope) + "</text>\n";
    }

    for (const auto& [n, e] : fit.points)
        svg += "<circle cx=\"" + num(px(std::log10(n))) + "\" cy=\"" +
               num(py(std::log10(e))) + "\" r=\"3.5\" fill=\"#d62728\"/>\n";

    svg += "</svg>\n";
    return svg;
}

}  // namespace walkbsde
