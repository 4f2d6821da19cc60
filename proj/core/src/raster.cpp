#include "centervec/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cvec {

LabelMap connected_components(const BinaryMask& mask, Connectivity conn) {
    const int h = mask.height();
    const int w = mask.width();
    LabelMap labels(mask.shape(), 0);
    const auto& offsets = detail::neighbor_offsets(conn);

    std::vector<std::int64_t> stack;
    std::uint32_t next_label = 0;
    for (std::int64_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || labels[start] != 0) continue;
        ++next_label;
        labels[start] = next_label;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::int64_t p = stack.back();
            stack.pop_back();
            const int r = static_cast<int>(p / w);
            const int c = static_cast<int>(p % w);
            for (const auto& d : offsets) {
                const int nr = r + d.row;
                const int nc = c + d.col;
                if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                const std::int64_t np = static_cast<std::int64_t>(nr) * w + nc;
                if (mask[np] && labels[np] == 0) {
                    labels[np] = next_label;
                    stack.push_back(np);
                }
            }
        }
    }
    return labels;
}

int count_labels(const LabelMap& labels) {
    std::vector<std::uint32_t> seen(labels.data());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    int n = static_cast<int>(seen.size());
    if (!seen.empty() && seen.front() == 0) --n;
    return n;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
    if (radius < 1) {
        throw std::invalid_argument("erosion radius must be >= 1, got " +
                                    std::to_string(radius));
    }
    std::vector<PixelCoord> element;
    for (int a = -radius; a <= radius; ++a) {
        for (int b = -radius; b <= radius; ++b) {
            if (a * a + b * b <= radius * radius) element.push_back({a, b});
        }
    }

    const int h = mask.height();
    const int w = mask.width();
    BinaryMask out(mask.shape(), 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) continue;
            bool keep = true;
            for (const auto& d : element) {
                const int nr = r + d.row;
                const int nc = c + d.col;
                if (nr < 0 || nr >= h || nc < 0 || nc >= w || !mask.at(nr, nc)) {
                    keep = false;
                    break;
                }
            }
            out.at(r, c) = keep ? 1 : 0;
        }
    }
    return out;
}

namespace {

// One-dimensional squared-distance lower envelope (Felzenszwalb-Huttenlocher).
// f holds per-site squared values, d receives min_p ((q-p)^2 + f[p]).
// Site values are integers, so the evaluated minima are exact; the double
// intersection abscissae only decide which of two tied parabolas evaluates a
// point, and tied parabolas agree at integer points.
void edt_envelope_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n, 0);
    std::vector<double> z(n + 1, 0.0);
    auto intersect = [&](int q, int p) {
        return (static_cast<double>(f[q] - f[p]) +
                static_cast<double>(q) * q - static_cast<double>(p) * p) /
               (2.0 * (q - p));
    };
    int k = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }

    d.resize(n);
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const std::int64_t dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

Raster<std::int64_t> squared_distance_transform(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();

    // Row phase: 1-D distance to the nearest in-row background, with virtual
    // background columns at -1 and w. Two integer sweeps.
    Raster<std::int64_t> row_dist(mask.shape(), 0);
    for (int r = 0; r < h; ++r) {
        int last_bg = -1;
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) {
                last_bg = c;
                row_dist.at(r, c) = 0;
            } else {
                row_dist.at(r, c) = c - last_bg;
            }
        }
        int next_bg = w;
        for (int c = w - 1; c >= 0; --c) {
            if (!mask.at(r, c)) {
                next_bg = c;
            } else {
                row_dist.at(r, c) = std::min<std::int64_t>(row_dist.at(r, c), next_bg - c);
            }
        }
    }

    // Column phase: lower envelope over rows, with two virtual all-background
    // rows at -1 and h carrying value 0. Column arrays are padded so the
    // virtual rows are sites 0 and h+1.
    Raster<std::int64_t> out(mask.shape(), 0);
    std::vector<std::int64_t> f(h + 2), d;
    for (int c = 0; c < w; ++c) {
        f[0] = 0;
        f[h + 1] = 0;
        for (int r = 0; r < h; ++r) {
            const std::int64_t rd = row_dist.at(r, c);
            f[r + 1] = rd * rd;
        }
        edt_envelope_1d(f, d);
        for (int r = 0; r < h; ++r) {
            out.at(r, c) = mask.at(r, c) ? d[r + 1] : 0;
        }
    }
    return out;
}

ScalarField distance_transform(const BinaryMask& mask) {
    const Raster<std::int64_t> sq = squared_distance_transform(mask);
    ScalarField out(mask.shape(), 0.0);
    for (std::int64_t i = 0; i < sq.size(); ++i) {
        out[i] = std::sqrt(static_cast<double>(sq[i]));
    }
    return out;
}

std::uint32_t nearest_label(PixelCoord point, const LabelMap& regions) {
    std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
    std::uint32_t best = 0;
    // Raster scan visits sites in (row, col) order; with a strict compare the
    // first minimum found is the (distance^2, row, col) lexicographic winner.
    for (int r = 0; r < regions.height(); ++r) {
        for (int c = 0; c < regions.width(); ++c) {
            const std::uint32_t label = regions.at(r, c);
            if (label == 0) continue;
            const std::int64_t dr = r - point.row;
            const std::int64_t dc = c - point.col;
            const std::int64_t d2 = dr * dr + dc * dc;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = label;
            }
        }
    }
    if (best == 0) {
        throw std::invalid_argument("nearest_label: regions map has no nonzero pixel");
    }
    return best;
}

BinaryMask fill_holes(const BinaryMask& mask, Connectivity conn) {
    const int h = mask.height();
    const int w = mask.width();
    const Connectivity bg_conn = complement(conn);
    const auto& offsets = detail::neighbor_offsets(bg_conn);

    // Flood background from the border; unreached background is a hole.
    BinaryMask reached(mask.shape(), 0);
    std::vector<std::int64_t> stack;
    auto push = [&](int r, int c) {
        const std::int64_t p = static_cast<std::int64_t>(r) * w + c;
        if (!mask[p] && !reached[p]) {
            reached[p] = 1;
            stack.push_back(p);
        }
    };
    for (int c = 0; c < w; ++c) {
        push(0, c);
        push(h - 1, c);
    }
    for (int r = 0; r < h; ++r) {
        push(r, 0);
        push(r, w - 1);
    }
    while (!stack.empty()) {
        const std::int64_t p = stack.back();
        stack.pop_back();
        const int r = static_cast<int>(p / w);
        const int c = static_cast<int>(p % w);
        for (const auto& d : offsets) {
            const int nr = r + d.row;
            const int nc = c + d.col;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            push(nr, nc);
        }
    }

    BinaryMask out = mask;
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (!mask[i] && !reached[i]) out[i] = 1;
    }
    return out;
}

}  // namespace cvec
