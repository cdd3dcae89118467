#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fermispec {

enum class LatticeKind { path, ring, hypercubic };
enum class Boundary { free, periodic };

inline std::string_view to_string(LatticeKind k) {
    switch (k) {
        case LatticeKind::path: return "path";
        case LatticeKind::ring: return "ring";
        case LatticeKind::hypercubic: return "hypercubic";
    }
    return "?";
}

inline std::string_view to_string(Boundary b) { return b == Boundary::free ? "free" : "periodic"; }

inline LatticeKind parse_lattice_kind(std::string_view s) {
    if (s == "path") return LatticeKind::path;
    if (s == "ring") return LatticeKind::ring;
    if (s == "hypercubic") return LatticeKind::hypercubic;
    throw std::invalid_argument("unknown lattice kind '" + std::string(s) + "'");
}

inline Boundary parse_boundary(std::string_view s) {
    if (s == "free") return Boundary::free;
    if (s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "'");
}

using Edge = std::pair<std::size_t, std::size_t>;

/// Finite graph with row-major vertex numbering. Edges are stored once, (i, j) with i < j, sorted.
class Lattice {
public:
    LatticeKind kind() const noexcept { return kind_; }
    Boundary boundary() const noexcept { return boundary_; }
    const std::vector<std::size_t>& dimensions() const noexcept { return dims_; }
    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::size_t degree(std::size_t vertex) const {
        if (vertex >= n_) {
            throw std::out_of_range("vertex " + std::to_string(vertex) + " out of range for lattice of " +
                                    std::to_string(n_) + " sites");
        }
        return degrees_[vertex];
    }

    /// 2 · number of axes; equals every vertex degree for ring and periodic lattices.
    std::size_t coordination_number() const noexcept { return 2 * dims_.size(); }

    bool is_regular() const noexcept {
        return std::adjacent_find(degrees_.begin(), degrees_.end(), std::not_equal_to<>()) == degrees_.end();
    }

    friend Lattice build_lattice(LatticeKind, std::vector<std::size_t>, Boundary);

private:
    LatticeKind kind_ = LatticeKind::path;
    Boundary boundary_ = Boundary::free;
    std::vector<std::size_t> dims_;
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> degrees_;
};

/**
 * Builds a path (1 axis, free), ring (1 axis, periodic) or hypercubic lattice.
 *
 * Periodic axes must have length >= 3: length 2 would place two bonds between
 * the same pair and length 1 a self-loop.
 */
inline Lattice build_lattice(LatticeKind kind, std::vector<std::size_t> dims, Boundary boundary) {
    if (dims.empty()) throw std::invalid_argument("lattice needs at least one dimension");
    if (kind == LatticeKind::path || kind == LatticeKind::ring) {
        if (dims.size() != 1) throw std::invalid_argument(std::string(to_string(kind)) + " lattice is one-dimensional");
        if (kind == LatticeKind::path && boundary != Boundary::free)
            throw std::invalid_argument("path lattice has free ends; use ring for periodic");
        if (kind == LatticeKind::ring && boundary != Boundary::periodic)
            throw std::invalid_argument("ring lattice is periodic; use path for free ends");
    }

    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("lattice dimension must be positive");
        if (boundary == Boundary::periodic && d < 3)
            throw std::invalid_argument("periodic axis of length " + std::to_string(d) +
                                        " would create duplicate edges or self-loops (need >= 3)");
        n *= d;
    }

    Lattice lat;
    lat.kind_ = kind;
    lat.boundary_ = boundary;
    lat.dims_ = std::move(dims);
    lat.n_ = n;

    // Row-major: the last axis varies fastest.
    std::vector<std::size_t> stride(lat.dims_.size());
    std::size_t s = 1;
    for (std::size_t a = lat.dims_.size(); a-- > 0;) {
        stride[a] = s;
        s *= lat.dims_[a];
    }

    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t a = 0; a < lat.dims_.size(); ++a) {
            const std::size_t coord = (v / stride[a]) % lat.dims_[a];
            std::size_t next;
            if (coord + 1 < lat.dims_[a]) {
                next = v + stride[a];
            } else if (boundary == Boundary::periodic) {
                next = v - coord * stride[a];
            } else {
                continue;
            }
            lat.edges_.emplace_back(std::min(v, next), std::max(v, next));
        }
    }
    std::sort(lat.edges_.begin(), lat.edges_.end());
    lat.edges_.erase(std::unique(lat.edges_.begin(), lat.edges_.end()), lat.edges_.end());

    lat.degrees_.assign(n, 0);
    for (const auto& [i, j] : lat.edges_) {
        ++lat.degrees_[i];
        ++lat.degrees_[j];
    }
    return lat;
}

}  // namespace fermispec
