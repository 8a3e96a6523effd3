#include "padfree/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace padfree {

std::size_t StencilTable::count_within(std::size_t i, double radius) const {
    const auto list = neighbors(i);
    const auto it = std::upper_bound(list.begin(), list.end(), radius,
                                     [](double r, const Neighbor& n) { return r < n.distance; });
    return static_cast<std::size_t>(it - list.begin());
}

void StencilTable::finish_node(std::vector<Neighbor>& list, std::size_t i) {
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    });
    if (list.empty()) isolated_.push_back(i);
    entries_.insert(entries_.end(), list.begin(), list.end());
    offsets_.push_back(entries_.size());
    list.clear();
}

namespace {

void check_radii(const NodeSet& nodes, std::span<const double> r_max) {
    if (r_max.size() != nodes.size()) throw std::invalid_argument("r_max must have one entry per node");
}

}  // namespace

StencilTable build_stencil_table_brute_force(const NodeSet& nodes, std::span<const double> r_max) {
    check_radii(nodes, r_max);
    StencilTable table;
    table.radius_.assign(r_max.begin(), r_max.end());
    table.offsets_.push_back(0);
    std::vector<Neighbor> list;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (r_max[i] > 0.0) {
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                if (j == i) continue;
                const Vec2 d = nodes.displacement(i, j);
                const double r = std::hypot(d.x, d.y);
                if (r <= r_max[i]) list.push_back({static_cast<std::uint32_t>(j), d.x, d.y, r});
            }
        }
        table.finish_node(list, i);
    }
    return table;
}

StencilTable build_stencil_table(const NodeSet& nodes, std::span<const double> r_max) {
    check_radii(nodes, r_max);
    StencilTable table;
    table.radius_.assign(r_max.begin(), r_max.end());
    table.offsets_.reserve(nodes.size() + 1);
    table.offsets_.push_back(0);
    if (nodes.size() == 0) return table;

    const Domain& dom = nodes.domain;
    double cell = 0.0;
    for (double r : r_max) cell = std::max(cell, r);
    if (!(cell > 0.0)) cell = 1.0;

    double x0 = nodes.position[0].x, x1 = x0, y0 = nodes.position[0].y, y1 = y0;
    for (const Vec2& p : nodes.position) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    // Periodic axes bin over the domain extent so that wrap-around cells line up.
    long nx, ny;
    double cx, cy;
    if (dom.periodic_x) {
        x0 = dom.x_min;
        nx = std::max(1L, static_cast<long>(std::floor(dom.width() / cell)));
        cx = dom.width() / static_cast<double>(nx);
    } else {
        nx = std::max(1L, static_cast<long>(std::floor((x1 - x0) / cell)) + 1);
        cx = cell;
    }
    if (dom.periodic_y) {
        y0 = dom.y_min;
        ny = std::max(1L, static_cast<long>(std::floor(dom.height() / cell)));
        cy = dom.height() / static_cast<double>(ny);
    } else {
        ny = std::max(1L, static_cast<long>(std::floor((y1 - y0) / cell)) + 1);
        cy = cell;
    }

    auto bin = [](double v, double origin, double width, long n) {
        long b = static_cast<long>(std::floor((v - origin) / width));
        return std::clamp(b, 0L, n - 1);
    };

    std::vector<long> cell_of(nodes.size());
    std::vector<std::size_t> cell_start(static_cast<std::size_t>(nx * ny) + 1, 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const long c = bin(nodes.position[i].y, y0, cy, ny) * nx + bin(nodes.position[i].x, x0, cx, nx);
        cell_of[i] = c;
        ++cell_start[static_cast<std::size_t>(c) + 1];
    }
    for (std::size_t c = 1; c < cell_start.size(); ++c) cell_start[c] += cell_start[c - 1];
    std::vector<std::uint32_t> cell_items(nodes.size());
    {
        std::vector<std::size_t> fill(cell_start.begin(), cell_start.end() - 1);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            cell_items[fill[static_cast<std::size_t>(cell_of[i])]++] = static_cast<std::uint32_t>(i);
        }
    }

    std::vector<Neighbor> list;
    std::vector<long> visit;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (r_max[i] > 0.0) {
            const long ci = cell_of[i] % nx;
            const long cj = cell_of[i] / nx;
            visit.clear();
            for (long dj = -1; dj <= 1; ++dj) {
                long bj = cj + dj;
                if (dom.periodic_y) bj = (bj % ny + ny) % ny;
                else if (bj < 0 || bj >= ny) continue;
                for (long di = -1; di <= 1; ++di) {
                    long bi = ci + di;
                    if (dom.periodic_x) bi = (bi % nx + nx) % nx;
                    else if (bi < 0 || bi >= nx) continue;
                    visit.push_back(bj * nx + bi);
                }
            }
            // Fewer than three cells on a periodic axis visits a cell twice.
            std::sort(visit.begin(), visit.end());
            visit.erase(std::unique(visit.begin(), visit.end()), visit.end());
            for (long c : visit) {
                for (std::size_t k = cell_start[static_cast<std::size_t>(c)];
                     k < cell_start[static_cast<std::size_t>(c) + 1]; ++k) {
                    const std::uint32_t j = cell_items[k];
                    if (j == i) continue;
                    const Vec2 d = nodes.displacement(i, j);
                    const double r = std::hypot(d.x, d.y);
                    if (r <= r_max[i]) list.push_back({j, d.x, d.y, r});
                }
            }
        }
        table.finish_node(list, i);
    }
    return table;
}

}  // namespace padfree
