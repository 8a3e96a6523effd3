#include "padfree/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace padfree {

namespace {

// Portable [0,1) sample from the raw 64-bit engine output.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec2 disc_sample(std::mt19937_64& rng) {
    for (;;) {
        const double a = 2.0 * uniform01(rng) - 1.0;
        const double b = 2.0 * uniform01(rng) - 1.0;
        if (a * a + b * b <= 1.0) return {a, b};
    }
}

long cells_along(double extent, double s, bool periodic) {
    const double n = extent / s;
    const long rounded = std::lround(n);
    if (periodic && std::abs(n - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, n)) {
        throw std::invalid_argument("periodic extent " + std::to_string(extent) +
                                    " is not a multiple of s=" + std::to_string(s));
    }
    if (!periodic) return static_cast<long>(std::ceil(n - 1e-9));
    return rounded;
}

}  // namespace

Vec2 NodeSet::displacement(std::size_t i, std::size_t j) const {
    double dx = position[j].x - position[i].x;
    double dy = position[j].y - position[i].y;
    if (domain.periodic_x) dx = minimum_image(dx, domain.width());
    if (domain.periodic_y) dy = minimum_image(dy, domain.height());
    return {dx, dy};
}

void NodeSet::set_ghost_condition(BoundaryCondition c) {
    for (std::size_t i = n_interior; i < size(); ++i) bc[i] = c;
}

NodeSet generate_nodes(const NodeGenerationParams& params) {
    const Domain& dom = params.domain;
    if (!(params.s > 0.0)) throw std::invalid_argument("node spacing s must be positive");
    if (!(params.perturbation >= 0.0 && params.perturbation <= 0.5)) {
        throw std::invalid_argument("perturbation eps/s must lie in [0, 0.5]");
    }
    if (!(params.ghost_width >= 0.0)) throw std::invalid_argument("ghost_width must be non-negative");
    if (!(dom.width() > 0.0 && dom.height() > 0.0)) throw std::invalid_argument("empty domain");

    if (params.ghost_width > 0.0 && dom.periodic_x && dom.periodic_y) {
        std::cerr << "warning: ghost_width ignored on a fully periodic domain\n";
    }

    const double s = params.s;
    const double eps = params.perturbation * s;
    const long nx = cells_along(dom.width(), s, dom.periodic_x);
    const long ny = cells_along(dom.height(), s, dom.periodic_y);

    // Ghost layers: enough lattice rows that any site whose perturbed
    // position can land in the strip is generated.
    const long gx = dom.periodic_x ? 0 : static_cast<long>(std::ceil((params.ghost_width + eps) / s));
    const long gy = dom.periodic_y ? 0 : static_cast<long>(std::ceil((params.ghost_width + eps) / s));

    NodeSet out;
    out.domain = dom;
    std::vector<Vec2> ghost_pos, ghost_site;

    std::mt19937_64 rng(params.seed);
    const double w = params.ghost_width;
    for (long j = -gy; j < ny + gy; ++j) {
        for (long i = -gx; i < nx + gx; ++i) {
            const Vec2 site{dom.x_min + (static_cast<double>(i) + 0.5) * s,
                            dom.y_min + (static_cast<double>(j) + 0.5) * s};
            // Always draw so the sequence does not depend on classification.
            const Vec2 d = disc_sample(rng);
            Vec2 p{site.x + eps * d.x, site.y + eps * d.y};
            const bool site_inside = i >= 0 && i < nx && j >= 0 && j < ny &&
                                     site.x <= dom.x_max && site.y <= dom.y_max;
            if (dom.periodic_x) p.x = dom.x_min + std::fmod(p.x - dom.x_min + dom.width(), dom.width());
            if (dom.periodic_y) p.y = dom.y_min + std::fmod(p.y - dom.y_min + dom.height(), dom.height());
            if (site_inside) {
                if (!dom.periodic_x) p.x = std::clamp(p.x, dom.x_min, dom.x_max);
                if (!dom.periodic_y) p.y = std::clamp(p.y, dom.y_min, dom.y_max);
                out.position.push_back(p);
                out.lattice_site.push_back(site);
                continue;
            }
            if (w <= 0.0) continue;
            const bool in_strip = p.x >= dom.x_min - w && p.x <= dom.x_max + w &&
                                  p.y >= dom.y_min - w && p.y <= dom.y_max + w && !dom.contains(p);
            if (in_strip) {
                ghost_pos.push_back(p);
                ghost_site.push_back(site);
            }
        }
    }
    out.n_interior = out.position.size();
    out.position.insert(out.position.end(), ghost_pos.begin(), ghost_pos.end());
    out.lattice_site.insert(out.lattice_site.end(), ghost_site.begin(), ghost_site.end());
    out.s.assign(out.position.size(), s);
    out.kind.assign(out.position.size(), NodeKind::interior);
    out.bc.assign(out.position.size(), BoundaryCondition::none);
    for (std::size_t k = out.n_interior; k < out.size(); ++k) {
        out.kind[k] = NodeKind::ghost;
        out.bc[k] = BoundaryCondition::analytic_dirichlet;
    }
    return out;
}

void write_nodes_csv(std::ostream& out, const NodeSet& nodes) {
    out << "id,x,y,s,kind\n" << std::setprecision(17);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << i << ',' << nodes.position[i].x << ',' << nodes.position[i].y << ',' << nodes.s[i] << ','
            << (nodes.is_interior(i) ? "interior" : "ghost") << '\n';
    }
}

}  // namespace padfree
