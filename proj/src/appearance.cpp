#include "verbtrack/appearance.hpp"

#include <algorithm>
#include <cmath>

#include "verbtrack/detection.hpp"
#include "verbtrack/errors.hpp"

namespace verbtrack {

namespace {

double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    if (t > delta * delta * delta) return std::cbrt(t);
    return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// Channel ranges covered by the histograms; values are clamped into range.
constexpr double kLMin = 0.0, kLMax = 100.0;
constexpr double kAbMin = -110.0, kAbMax = 110.0;

int bin_of(double v, double lo, double hi, int bins) {
    double unit = (v - lo) / (hi - lo);
    int b = static_cast<int>(unit * bins);
    return std::clamp(b, 0, bins - 1);
}

} // namespace

std::array<double, 3> srgb_to_lab(const Rgb& c) {
    double r = srgb_linearize(c.r / 255.0);
    double g = srgb_linearize(c.g / 255.0);
    double b = srgb_linearize(c.b / 255.0);
    // sRGB -> XYZ, D65 white point.
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
    double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

AppearanceHistogram appearance_histogram(const PixelSource& image,
                                         const DetectionBox& box,
                                         double shrink, int bins) {
    AppearanceHistogram h;
    h.bins = bins;
    h.l.assign(bins, 0.0);
    h.a.assign(bins, 0.0);
    h.b.assign(bins, 0.0);

    double w = box.w * shrink, hgt = box.h * shrink;
    double x0 = box.cx - w / 2, x1 = box.cx + w / 2;
    double y0 = box.cy - hgt / 2, y1 = box.cy + hgt / 2;
    // Pixels whose centers (i+0.5, j+0.5) fall inside the shrunken box.
    int ix0 = std::max(0, static_cast<int>(std::ceil(x0 - 0.5)));
    int ix1 = std::min(image.width() - 1, static_cast<int>(std::floor(x1 - 0.5)));
    int iy0 = std::max(0, static_cast<int>(std::ceil(y0 - 0.5)));
    int iy1 = std::min(image.height() - 1, static_cast<int>(std::floor(y1 - 0.5)));

    long count = 0;
    for (int y = iy0; y <= iy1; ++y) {
        for (int x = ix0; x <= ix1; ++x) {
            auto lab = srgb_to_lab(image.pixel(x, y));
            h.l[bin_of(lab[0], kLMin, kLMax, bins)] += 1.0;
            h.a[bin_of(lab[1], kAbMin, kAbMax, bins)] += 1.0;
            h.b[bin_of(lab[2], kAbMin, kAbMax, bins)] += 1.0;
            ++count;
        }
    }
    if (count == 0)
        throw EmptyRegion("box at (" + std::to_string(box.cx) + ", " +
                          std::to_string(box.cy) + ") covers no pixels");
    for (int i = 0; i < bins; ++i) {
        h.l[i] /= count;
        h.a[i] /= count;
        h.b[i] /= count;
    }
    return h;
}

double emd(const AppearanceHistogram& h1, const AppearanceHistogram& h2) {
    if (h1.bins != h2.bins)
        throw SchemaMismatch("appearance histograms have different bin counts");
    auto channel = [&](const std::vector<double>& a, const std::vector<double>& b) {
        // 1-D transport cost: sum of |CDF differences|, scaled by bin count
        // so one full bin of mass moved end to end costs (bins-1)/bins.
        double cdf_a = 0.0, cdf_b = 0.0, cost = 0.0;
        for (int i = 0; i < h1.bins; ++i) {
            cdf_a += a[i];
            cdf_b += b[i];
            cost += std::fabs(cdf_a - cdf_b);
        }
        return cost / h1.bins;
    };
    return channel(h1.l, h2.l) + channel(h1.a, h2.a) + channel(h1.b, h2.b);
}

} // namespace verbtrack
