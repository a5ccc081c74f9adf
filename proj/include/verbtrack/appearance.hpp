#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace verbtrack {

struct DetectionBox;

// Per-channel CIELAB histograms (D65 white point), each normalized to sum 1.
struct AppearanceHistogram {
    int bins = 12;
    std::vector<double> l, a, b;

    bool operator==(const AppearanceHistogram&) const = default;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

// Minimal image accessor so histograms can be computed from any pixel store.
class PixelSource {
public:
    virtual ~PixelSource() = default;
    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual Rgb pixel(int x, int y) const = 0;
};

// sRGB (0..255) -> CIELAB under D65. Returns {L, a, b}.
std::array<double, 3> srgb_to_lab(const Rgb& c);

// Histogram of the box region after scaling it about its center by `shrink`
// (0.6 keeps the central 60% so background pixels near the border drop out).
// Throws EmptyRegion when no pixel centers fall inside the clipped region.
AppearanceHistogram appearance_histogram(const PixelSource& image,
                                         const DetectionBox& box,
                                         double shrink = 0.6,
                                         int bins = 12);

// Sum over the three channels of the 1-D earth mover's distance between the
// normalized histograms (per channel in [0,1], so the total lies in [0,3]).
// Throws SchemaMismatch when bin counts differ.
double emd(const AppearanceHistogram& h1, const AppearanceHistogram& h2);

} // namespace verbtrack
