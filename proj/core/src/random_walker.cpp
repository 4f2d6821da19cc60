#include "centervec/random_walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cvec {

namespace {

constexpr double kTieEpsilon = 1e-9;

void validate(const RWParams& params) {
    if (!(params.beta >= 0.0)) throw std::invalid_argument("rw beta must be >= 0");
    if (!(params.cg_tolerance > 0.0)) throw std::invalid_argument("cg_tolerance must be > 0");
    if (params.cg_max_iters < 1) throw std::invalid_argument("cg_max_iters must be >= 1");
}

/// Compressed sparse rows of the unseeded Laplacian block.
struct Csr {
    std::vector<std::int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    std::vector<double> diag;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        const int n = static_cast<int>(diag.size());
        for (int i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                acc -= val[k] * x[col[k]];
            }
            y[i] = acc;
        }
    }
};

// Jacobi-preconditioned conjugate gradient on an SPD system.
std::vector<double> solve_pcg(const Csr& a, const std::vector<double>& b,
                              double tolerance, int max_iters) {
    const int n = static_cast<int>(b.size());
    std::vector<double> x(n, 0.0);
    const double b_norm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    if (b_norm == 0.0) return x;

    std::vector<double> r = b;
    std::vector<double> z(n), p(n), q(n);
    for (int i = 0; i < n; ++i) z[i] = r[i] / a.diag[i];
    p = z;
    double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);

    for (int iter = 0; iter < max_iters; ++iter) {
        const double r_norm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
        if (r_norm <= tolerance * b_norm) return x;

        a.multiply(p, q);
        const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        for (int i = 0; i < n; ++i) z[i] = r[i] / a.diag[i];
        const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    const double r_norm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
    if (r_norm <= tolerance * b_norm) return x;
    throw std::runtime_error("random walker: conjugate gradient did not reach tolerance " +
                             std::to_string(tolerance) + " within " +
                             std::to_string(max_iters) + " iterations");
}

struct PixelGraph {
    std::vector<std::int64_t> node_of_pixel;  // raster index -> node id, -1 outside
    std::vector<std::int64_t> pixel_of_node;
    std::vector<std::uint32_t> seed_label;    // per node, 0 = not a seed
    std::vector<bool> reachable;              // per node, some seed in its component
    std::vector<std::vector<std::pair<int, double>>> edges;  // per node: (neighbor, weight)
};

PixelGraph build_graph(const BinaryMask& inside, const CenterRegions& regions,
                       const ScalarField& guidance, const RWParams& params) {
    const int h = inside.height();
    const int w = inside.width();
    PixelGraph g;
    g.node_of_pixel.assign(inside.size(), -1);
    for (std::int64_t i = 0; i < inside.size(); ++i) {
        if (inside[i]) {
            g.node_of_pixel[i] = static_cast<std::int64_t>(g.pixel_of_node.size());
            g.pixel_of_node.push_back(i);
        }
    }
    const int n = static_cast<int>(g.pixel_of_node.size());
    g.seed_label.assign(n, 0);
    g.edges.assign(n, {});
    for (int u = 0; u < n; ++u) {
        const std::int64_t pix = g.pixel_of_node[u];
        g.seed_label[u] = regions.labels[pix];
        const int r = static_cast<int>(pix / w);
        const int c = static_cast<int>(pix % w);
        for (const auto& d : detail::neighbor_offsets(params.connectivity)) {
            const int nr = r + d.row;
            const int nc = c + d.col;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const std::int64_t npix = static_cast<std::int64_t>(nr) * w + nc;
            const std::int64_t v = g.node_of_pixel[npix];
            if (v < 0) continue;
            const double diff = guidance[pix] - guidance[npix];
            g.edges[u].push_back({static_cast<int>(v), std::exp(-params.beta * diff * diff)});
        }
    }

    // Mark nodes whose component holds at least one seed.
    g.reachable.assign(n, false);
    std::vector<int> component(n, -1);
    std::vector<int> stack;
    int comp_count = 0;
    std::vector<bool> comp_has_seed;
    for (int start = 0; start < n; ++start) {
        if (component[start] >= 0) continue;
        const int comp = comp_count++;
        comp_has_seed.push_back(false);
        component[start] = comp;
        stack.push_back(start);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            if (g.seed_label[u] != 0) comp_has_seed[comp] = true;
            for (const auto& [v, weight] : g.edges[u]) {
                if (component[v] < 0) {
                    component[v] = comp;
                    stack.push_back(v);
                }
            }
        }
    }
    for (int u = 0; u < n; ++u) g.reachable[u] = comp_has_seed[component[u]];
    return g;
}

}  // namespace

RWProbabilities random_walker_probabilities(const BinaryMask& inside,
                                            const CenterRegions& regions,
                                            const ScalarField& guidance,
                                            const RWParams& params, RWSolveMode mode) {
    validate(params);
    if (!(inside.shape() == regions.labels.shape()) || !(inside.shape() == guidance.shape())) {
        throw std::invalid_argument("shape mismatch: random walker inputs");
    }
    const bool any_inside =
        std::any_of(inside.data().begin(), inside.data().end(), [](std::uint8_t v) { return v != 0; });
    if (any_inside && regions.count == 0) {
        throw std::invalid_argument("random walker: inside mask is nonempty but no seed regions");
    }

    RWProbabilities out;
    {
        std::vector<std::uint32_t> ids(regions.labels.data());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (!ids.empty() && ids.front() == 0) ids.erase(ids.begin());
        out.label_ids = std::move(ids);
    }
    out.fields.assign(out.label_ids.size(), ScalarField(inside.shape(), 0.0));
    if (!any_inside || out.label_ids.empty()) return out;

    const PixelGraph graph = build_graph(inside, regions, guidance, params);
    const int n = static_cast<int>(graph.pixel_of_node.size());

    // Unknowns: reachable non-seed nodes.
    std::vector<int> unknown_of_node(n, -1);
    std::vector<int> node_of_unknown;
    for (int u = 0; u < n; ++u) {
        if (graph.seed_label[u] == 0 && graph.reachable[u]) {
            unknown_of_node[u] = static_cast<int>(node_of_unknown.size());
            node_of_unknown.push_back(u);
        }
        if (graph.seed_label[u] == 0 && !graph.reachable[u]) ++out.unreachable_pixels;
    }
    const int m = static_cast<int>(node_of_unknown.size());

    Csr laplacian;
    laplacian.row_ptr.assign(m + 1, 0);
    laplacian.diag.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const int u = node_of_unknown[i];
        double degree = 0.0;
        for (const auto& [v, weight] : graph.edges[u]) {
            degree += weight;
            if (unknown_of_node[v] >= 0) {
                laplacian.col.push_back(unknown_of_node[v]);
                laplacian.val.push_back(weight);
            }
        }
        laplacian.diag[i] = degree;
        laplacian.row_ptr[i + 1] = static_cast<std::int64_t>(laplacian.col.size());
    }

    const std::size_t k = out.label_ids.size();
    const std::size_t solves = (mode == RWSolveMode::complement && k >= 1) ? k - 1 : k;
    std::vector<std::vector<double>> solutions(k);
    for (std::size_t li = 0; li < solves; ++li) {
        const std::uint32_t label = out.label_ids[li];
        std::vector<double> b(m, 0.0);
        for (int i = 0; i < m; ++i) {
            const int u = node_of_unknown[i];
            for (const auto& [v, weight] : graph.edges[u]) {
                if (graph.seed_label[v] == label) b[i] += weight;
            }
        }
        solutions[li] = solve_pcg(laplacian, b, params.cg_tolerance, params.cg_max_iters);
    }
    if (mode == RWSolveMode::complement && k >= 1) {
        std::vector<double> last(m, 1.0);
        for (std::size_t li = 0; li + 1 < k; ++li) {
            for (int i = 0; i < m; ++i) last[i] -= solutions[li][i];
        }
        // Unreachable-from-this-label components come out exactly right: the
        // complement runs only over unknowns of seeded components, where the
        // solved labels already account for the full probability mass.
        solutions[k - 1] = std::move(last);
    }

    for (std::size_t li = 0; li < k; ++li) {
        const std::uint32_t label = out.label_ids[li];
        ScalarField& field = out.fields[li];
        for (int u = 0; u < n; ++u) {
            const std::int64_t pix = graph.pixel_of_node[u];
            if (graph.seed_label[u] != 0) {
                field[pix] = graph.seed_label[u] == label ? 1.0 : 0.0;
            } else if (unknown_of_node[u] >= 0) {
                field[pix] = solutions[li][unknown_of_node[u]];
            }
        }
    }
    return out;
}

LabelMap random_walker_segment(const BinaryMask& inside, const CenterRegions& regions,
                               const ScalarField& guidance, const RWParams& params) {
    const RWProbabilities probs =
        random_walker_probabilities(inside, regions, guidance, params, RWSolveMode::complement);

    LabelMap out(inside.shape(), 0);
    std::vector<PixelCoord> sites;
    std::vector<std::uint32_t> site_labels;
    auto nearest_site_label = [&](int row, int col) {
        if (sites.empty()) {
            for (int r = 0; r < regions.labels.height(); ++r) {
                for (int c = 0; c < regions.labels.width(); ++c) {
                    if (regions.labels.at(r, c) != 0) {
                        sites.push_back({r, c});
                        site_labels.push_back(regions.labels.at(r, c));
                    }
                }
            }
        }
        std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
        std::uint32_t best = 0;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const std::int64_t dr = sites[i].row - row;
            const std::int64_t dc = sites[i].col - col;
            const std::int64_t d2 = dr * dr + dc * dc;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = site_labels[i];
            }
        }
        return best;
    };

    for (int r = 0; r < inside.height(); ++r) {
        for (int c = 0; c < inside.width(); ++c) {
            if (!inside.at(r, c)) continue;
            const std::int64_t pix = static_cast<std::int64_t>(r) * inside.width() + c;
            if (regions.labels[pix] != 0) {
                out.at(r, c) = regions.labels[pix];
                continue;
            }
            double best_p = -1.0;
            for (std::size_t li = 0; li < probs.label_ids.size(); ++li) {
                best_p = std::max(best_p, probs.fields[li][pix]);
            }
            if (best_p <= 0.0) {
                out.at(r, c) = nearest_site_label(r, c);
                continue;
            }
            // Smallest label within the tie band of the maximum.
            for (std::size_t li = 0; li < probs.label_ids.size(); ++li) {
                if (probs.fields[li][pix] >= best_p - kTieEpsilon) {
                    out.at(r, c) = probs.label_ids[li];
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace cvec
