#include "verbtrack/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "verbtrack/errors.hpp"

namespace verbtrack {

namespace {

// Clamped uniform knot vector for a cubic spline with `pieces` spans on
// [0, len]: 4-fold end knots, simple interior knots (hence C2 everywhere).
std::vector<double> make_knots(int pieces, double len) {
    std::vector<double> knots;
    for (int i = 0; i < 4; ++i) knots.push_back(0.0);
    for (int i = 1; i < pieces; ++i) knots.push_back(len * i / pieces);
    for (int i = 0; i < 4; ++i) knots.push_back(len);
    return knots;
}

int find_span(const std::vector<double>& knots, double x) {
    int lo = 3;                                  // first valid span
    int hi = static_cast<int>(knots.size()) - 5; // last valid span
    if (x >= knots[hi + 1]) return hi;
    if (x <= knots[lo]) return lo;
    while (!(knots[lo] <= x && x < knots[lo + 1])) ++lo;
    return lo;
}

// Nonzero cubic basis values N_{span-3..span}(x) (Cox-de Boor).
std::array<double, 4> basis_at(const std::vector<double>& knots, int span, double x) {
    std::array<double, 4> n{1.0, 0.0, 0.0, 0.0};
    std::array<double, 4> left{}, right{};
    for (int j = 1; j <= 3; ++j) {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[r + 1] + left[j - r];
            double temp = denom != 0.0 ? n[r] / denom : 0.0;
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    return n;
}

} // namespace

std::vector<double> smooth_signal(const std::vector<double>& signal, int pieces) {
    const int n = static_cast<int>(signal.size());
    if (n < 2) throw TooShort("need at least 2 samples to smooth");
    int p = std::max(1, std::min(pieces, n / 4));
    double len = n - 1.0;
    auto knots = make_knots(p, len);
    const int ncoef = p + 3;

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, ncoef);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        int span = find_span(knots, i);
        auto b = basis_at(knots, span, i);
        for (int r = 0; r < 4; ++r) design(i, span - 3 + r) = b[r];
        y(i) = signal[i];
    }
    Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
    Eigen::VectorXd fitted = design * coef;
    return std::vector<double>(fitted.data(), fitted.data() + n);
}

Track smooth_track(const Track& track, int pieces_center, int pieces_dims) {
    const std::size_t n = track.boxes.size();
    std::vector<double> cx(n), cy(n), w(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = track.boxes[i].cx;
        cy[i] = track.boxes[i].cy;
        w[i] = track.boxes[i].w;
        h[i] = track.boxes[i].h;
    }
    cx = smooth_signal(cx, pieces_center);
    cy = smooth_signal(cy, pieces_center);
    w = smooth_signal(w, pieces_dims);
    h = smooth_signal(h, pieces_dims);

    Track out = track;
    for (std::size_t i = 0; i < n; ++i) {
        out.boxes[i].cx = cx[i];
        out.boxes[i].cy = cy[i];
        out.boxes[i].w = std::max(1.0, w[i]); // a box never collapses below 1 px
        out.boxes[i].h = std::max(1.0, h[i]);
    }
    return out;
}

} // namespace verbtrack
