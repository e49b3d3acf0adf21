#include "lutbench/simplex.hpp"

#include "lutbench/errors.hpp"
#include "lutbench/rng.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

namespace lutbench {

namespace {

constexpr std::int32_t kInfinite = -1;
constexpr std::size_t kMaxDims = 10;
// Determinants whose magnitude is below this fraction of the Hadamard bound
// are treated as exact zeros and resolved by the symbolic perturbation.
constexpr double kPredicateTolerance = 1e-10;

int sign_with_tolerance(double det, double bound) {
    if (std::abs(det) <= kPredicateTolerance * bound) return 0;
    return det > 0.0 ? 1 : -1;
}

/// Incremental Delaunay builder working in normalized coordinates.
class DelaunayBuilder {
public:
    DelaunayBuilder(std::size_t dims, const Matrix& points)
        : d_(dims), w_(dims + 1), pts_(points) {}

    void run() {
        const std::size_t n = pts_.rows();
        auto initial = initial_simplex();
        make_initial_cells(initial);

        std::vector<std::int32_t> order;
        order.reserve(n);
        std::vector<char> used(n, 0);
        for (auto v : initial) used[static_cast<std::size_t>(v)] = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i]) order.push_back(static_cast<std::int32_t>(i));
        CounterRng rng(CounterRng::derive(0x5EEDDE1A, order.size()));
        shuffle(order.begin(), order.end(), rng);

        for (auto p : order) insert(p);
    }

    /// Finite cells after the build, renumbered, with hull facets marked kBoundary.
    void export_to(std::vector<std::int32_t>& vertices, std::vector<std::int32_t>& neighbors) const {
        const std::size_t total = alive_.size();
        std::vector<std::int32_t> remap(total, kInfinite);
        std::int32_t next = 0;
        for (std::size_t c = 0; c < total; ++c)
            if (alive_[c] && !is_infinite(c)) remap[c] = next++;
        vertices.assign(static_cast<std::size_t>(next) * w_, 0);
        neighbors.assign(static_cast<std::size_t>(next) * w_, SimplicialComplex::kBoundary);
        for (std::size_t c = 0; c < total; ++c) {
            if (remap[c] == kInfinite) continue;
            const auto out = static_cast<std::size_t>(remap[c]) * w_;
            for (std::size_t j = 0; j < w_; ++j) {
                vertices[out + j] = verts_[c * w_ + j];
                const auto nb = neigh_[c * w_ + j];
                neighbors[out + j] = remap[static_cast<std::size_t>(nb)];
            }
        }
    }

private:
    std::size_t d_;
    std::size_t w_;  // vertices per cell
    const Matrix& pts_;
    std::vector<std::int32_t> verts_;
    std::vector<std::int32_t> neigh_;
    std::vector<char> alive_;
    std::vector<std::size_t> free_;
    std::vector<std::uint32_t> stamp_in_;
    std::vector<std::uint32_t> stamp_out_;
    std::uint32_t stamp_ = 0;
    std::size_t hint_ = 0;
    std::uint64_t walk_counter_ = 0;

    const std::int32_t* cell(std::size_t c) const { return verts_.data() + c * w_; }

    bool is_infinite(std::size_t c) const {
        const auto* v = cell(c);
        for (std::size_t j = 0; j < w_; ++j)
            if (v[j] == kInfinite) return true;
        return false;
    }

    std::size_t infinite_position(std::size_t c) const {
        const auto* v = cell(c);
        for (std::size_t j = 0; j < w_; ++j)
            if (v[j] == kInfinite) return j;
        return w_;
    }

    // --- predicates -------------------------------------------------------

    /// Orientation sign of D+1 finite points: sign of det[[x_i, 1]].
    int orient(const std::int32_t* ids) const {
        std::array<double, kMaxDims * kMaxDims> m{};
        double bound = 1.0;
        const auto x0 = pts_.row(static_cast<std::size_t>(ids[0]));
        for (std::size_t i = 1; i <= d_; ++i) {
            const auto xi = pts_.row(static_cast<std::size_t>(ids[i]));
            double norm2 = 0.0;
            for (std::size_t k = 0; k < d_; ++k) {
                const double e = xi[k] - x0[k];
                m[(i - 1) * d_ + k] = e;
                norm2 += e * e;
            }
            bound *= std::sqrt(norm2);
        }
        if (bound == 0.0) return 0;
        double det = determinant_inplace(std::span<double>(m.data(), d_ * d_), d_);
        if (d_ % 2 == 1) det = -det;
        return sign_with_tolerance(det, bound);
    }

    /// Orientation of `ids` with position `pos` replaced by point `p`.
    int orient_replaced(const std::int32_t* ids, std::size_t pos, std::int32_t p) const {
        std::array<std::int32_t, kMaxDims + 1> tmp{};
        std::copy(ids, ids + w_, tmp.begin());
        tmp[pos] = p;
        return orient(tmp.data());
    }

    /// True when p lies strictly inside the (perturbed) circumsphere of the
    /// positively oriented finite cell `c`.
    bool in_sphere(std::size_t c, std::int32_t p) const {
        const auto* ids = cell(c);
        std::array<double, (kMaxDims + 1) * (kMaxDims + 1)> m{};
        const auto xp = pts_.row(static_cast<std::size_t>(p));
        double bound = 1.0;
        for (std::size_t i = 0; i < w_; ++i) {
            const auto xi = pts_.row(static_cast<std::size_t>(ids[i]));
            double lift = 0.0;
            for (std::size_t k = 0; k < d_; ++k) {
                const double e = xi[k] - xp[k];
                m[i * w_ + k] = e;
                lift += e * e;
            }
            m[i * w_ + d_] = lift;
            bound *= std::sqrt(lift + lift * lift);
        }
        if (bound == 0.0) return false;
        const double det = determinant_inplace(std::span<double>(m.data(), w_ * w_), w_);
        const int s = sign_with_tolerance(det, bound);
        if (s != 0) return s > 0;

        // Symbolic perturbation: the lifted height of point i gets eps_i, with
        // larger indices dominating. The first non-vanishing cofactor decides.
        std::array<std::pair<std::int32_t, std::size_t>, kMaxDims + 2> rows{};
        for (std::size_t i = 0; i < w_; ++i) rows[i] = {ids[i], i};
        rows[w_] = {p, w_};
        std::sort(rows.begin(), rows.begin() + static_cast<long>(w_ + 1),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; r <= w_; ++r) {
            const std::size_t i = rows[r].second;
            if (i == w_) return false;  // -O(cell) < 0: p is lifted above the sphere
            std::array<std::int32_t, kMaxDims + 1> sub{};
            std::size_t k = 0;
            for (std::size_t j = 0; j < w_; ++j)
                if (j != i) sub[k++] = ids[j];
            sub[k] = p;
            const int o = orient(sub.data());
            if (o != 0) {
                const int parity = ((i + d_) % 2 == 0) ? 1 : -1;
                return parity * o > 0;
            }
        }
        return false;
    }

    bool in_conflict(std::size_t c, std::int32_t p) const {
        const std::size_t inf = infinite_position(c);
        if (inf == w_) return in_sphere(c, p);
        const int o = orient_replaced(cell(c), inf, p);
        if (o != 0) return o > 0;
        const auto nb = static_cast<std::size_t>(neigh_[c * w_ + inf]);
        return in_sphere(nb, p);
    }

    // --- construction -----------------------------------------------------

    std::vector<std::int32_t> initial_simplex() const {
        const std::size_t n = pts_.rows();
        std::vector<std::int32_t> chosen{0};
        std::vector<std::vector<double>> basis;
        const auto x0 = pts_.row(0);
        for (std::size_t i = 1; i < n && chosen.size() < w_; ++i) {
            std::vector<double> v(d_);
            const auto xi = pts_.row(i);
            for (std::size_t k = 0; k < d_; ++k) v[k] = xi[k] - x0[k];
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t k = 0; k < d_; ++k) dot += v[k] * b[k];
                for (std::size_t k = 0; k < d_; ++k) v[k] -= dot * b[k];
            }
            double norm = 0.0;
            for (double e : v) norm += e * e;
            norm = std::sqrt(norm);
            if (norm > 1e-9) {
                for (double& e : v) e /= norm;
                basis.push_back(std::move(v));
                chosen.push_back(static_cast<std::int32_t>(i));
            }
        }
        if (chosen.size() < w_)
            throw DegenerateInput("points are affinely dependent (no full-dimensional simplex)");
        if (orient(chosen.data()) < 0) std::swap(chosen[0], chosen[1]);
        if (orient(chosen.data()) == 0)
            throw DegenerateInput("initial simplex is numerically flat");
        return chosen;
    }

    std::size_t allocate_cell() {
        if (!free_.empty()) {
            const auto c = free_.back();
            free_.pop_back();
            alive_[c] = 1;
            return c;
        }
        const std::size_t c = alive_.size();
        verts_.resize(verts_.size() + w_, 0);
        neigh_.resize(neigh_.size() + w_, kInfinite);
        alive_.push_back(1);
        stamp_in_.push_back(0);
        stamp_out_.push_back(0);
        return c;
    }

    void release_cell(std::size_t c) {
        alive_[c] = 0;
        free_.push_back(c);
    }

    struct FacetRecord {
        std::array<std::int32_t, kMaxDims> key;
        std::size_t cell;
        std::size_t pos;
    };

    /// Pairs up the facets of `cells` at the given positions (facets opposite `pos`).
    void link_facets(std::vector<FacetRecord>& records) {
        std::sort(records.begin(), records.end(),
                  [](const FacetRecord& a, const FacetRecord& b) { return a.key < b.key; });
        for (std::size_t i = 0; i + 1 < records.size(); ++i) {
            if (records[i].key == records[i + 1].key) {
                const auto& a = records[i];
                const auto& b = records[i + 1];
                neigh_[a.cell * w_ + a.pos] = static_cast<std::int32_t>(b.cell);
                neigh_[b.cell * w_ + b.pos] = static_cast<std::int32_t>(a.cell);
                ++i;
            }
        }
    }

    FacetRecord facet_record(std::size_t c, std::size_t pos) const {
        FacetRecord r{};
        r.key.fill(std::numeric_limits<std::int32_t>::max());
        std::size_t k = 0;
        for (std::size_t j = 0; j < w_; ++j)
            if (j != pos) r.key[k++] = cell(c)[j];
        std::sort(r.key.begin(), r.key.begin() + static_cast<long>(d_));
        r.cell = c;
        r.pos = pos;
        return r;
    }

    void make_initial_cells(const std::vector<std::int32_t>& initial) {
        const std::size_t c0 = allocate_cell();
        std::copy(initial.begin(), initial.end(), verts_.begin() + static_cast<long>(c0 * w_));
        std::vector<std::size_t> cells{c0};
        for (std::size_t j = 0; j < w_; ++j) {
            const std::size_t c = allocate_cell();
            auto* v = verts_.data() + c * w_;
            std::copy(initial.begin(), initial.end(), v);
            v[j] = kInfinite;
            std::swap(v[j], v[j == 0 ? 1 : 0]);
            cells.push_back(c);
        }
        std::vector<FacetRecord> records;
        for (auto c : cells)
            for (std::size_t j = 0; j < w_; ++j) records.push_back(facet_record(c, j));
        link_facets(records);
        hint_ = c0;
    }

    std::size_t scan_for_conflict(std::int32_t p) const {
        for (std::size_t c = 0; c < alive_.size(); ++c)
            if (alive_[c] && in_conflict(c, p)) return c;
        throw DegenerateInput("no conflicting simplex for point " + std::to_string(p));
    }

    void check_duplicate(std::size_t c, std::int32_t p) const {
        const auto xp = pts_.row(static_cast<std::size_t>(p));
        for (std::size_t j = 0; j < w_; ++j) {
            const auto v = cell(c)[j];
            if (v == kInfinite) continue;
            const auto xv = pts_.row(static_cast<std::size_t>(v));
            if (std::equal(xp.begin(), xp.end(), xv.begin()))
                throw DegenerateInput("duplicate points " + std::to_string(v) + " and " +
                                      std::to_string(p));
        }
    }

    /// Visibility walk from the hint to a cell in conflict with p.
    std::size_t locate_conflict(std::int32_t p) {
        std::size_t c = alive_[hint_] ? hint_ : 0;
        while (!alive_[c]) ++c;
        if (const auto inf = infinite_position(c); inf != w_)
            c = static_cast<std::size_t>(neigh_[c * w_ + inf]);

        const std::size_t max_steps = 64 + 4 * alive_.size();
        for (std::size_t step = 0; step < max_steps; ++step) {
            const std::size_t start = static_cast<std::size_t>(walk_counter_++ % w_);
            bool moved = false;
            for (std::size_t t = 0; t < w_; ++t) {
                const std::size_t j = (start + t) % w_;
                if (orient_replaced(cell(c), j, p) < 0) {
                    const auto nb = static_cast<std::size_t>(neigh_[c * w_ + j]);
                    if (is_infinite(nb)) return in_conflict(nb, p) ? nb : scan_for_conflict(p);
                    c = nb;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                check_duplicate(c, p);
                return in_conflict(c, p) ? c : scan_for_conflict(p);
            }
        }
        return scan_for_conflict(p);
    }

    struct BoundaryFacet {
        std::size_t inside;
        std::size_t pos;
        std::size_t outside;
    };

    void insert(std::int32_t p) {
        const std::size_t start = locate_conflict(p);
        ++stamp_;
        std::vector<std::size_t> cavity{start};
        stamp_in_[start] = stamp_;

        std::vector<BoundaryFacet> boundary;
        for (int attempt = 0;; ++attempt) {
            // Grow the conflict region by breadth-first search.
            for (std::size_t i = 0; i < cavity.size(); ++i) {
                const std::size_t c = cavity[i];
                for (std::size_t j = 0; j < w_; ++j) {
                    const auto nb = static_cast<std::size_t>(neigh_[c * w_ + j]);
                    if (stamp_in_[nb] == stamp_ || stamp_out_[nb] == stamp_) continue;
                    if (in_conflict(nb, p)) {
                        stamp_in_[nb] = stamp_;
                        cavity.push_back(nb);
                    } else {
                        stamp_out_[nb] = stamp_;
                    }
                }
            }
            boundary.clear();
            std::size_t offender = alive_.size();
            for (const std::size_t c : cavity) {
                for (std::size_t j = 0; j < w_; ++j) {
                    const auto nb = static_cast<std::size_t>(neigh_[c * w_ + j]);
                    if (stamp_in_[nb] == stamp_) continue;
                    boundary.push_back({c, j, nb});
                    if (offender == alive_.size() && !star_facet_valid(c, j, p)) offender = nb;
                }
            }
            if (offender == alive_.size()) break;
            if (attempt > 1000)
                throw DegenerateInput("could not form a star-shaped cavity for point " +
                                      std::to_string(p));
            // Floating-point tie: the cavity is not star-shaped from p, so absorb
            // the neighbor behind the offending facet and retry.
            stamp_out_[offender] = 0;
            stamp_in_[offender] = stamp_;
            cavity.push_back(offender);
        }

        // Index in each outside cell that points back into the cavity.
        std::vector<std::size_t> back_pos(boundary.size());
        std::vector<std::array<std::int32_t, kMaxDims + 1>> new_verts(boundary.size());
        for (std::size_t b = 0; b < boundary.size(); ++b) {
            const auto& f = boundary[b];
            const auto* nbn = neigh_.data() + f.outside * w_;
            back_pos[b] = static_cast<std::size_t>(
                std::find(nbn, nbn + w_, static_cast<std::int32_t>(f.inside)) - nbn);
            std::copy(cell(f.inside), cell(f.inside) + w_, new_verts[b].begin());
            new_verts[b][f.pos] = p;
        }
        for (const std::size_t c : cavity) release_cell(c);

        std::vector<FacetRecord> records;
        records.reserve(boundary.size() * d_);
        std::size_t last = 0;
        for (std::size_t b = 0; b < boundary.size(); ++b) {
            const auto& f = boundary[b];
            const std::size_t nc = allocate_cell();
            std::copy(new_verts[b].begin(), new_verts[b].begin() + static_cast<long>(w_),
                      verts_.begin() + static_cast<long>(nc * w_));
            neigh_[nc * w_ + f.pos] = static_cast<std::int32_t>(f.outside);
            neigh_[f.outside * w_ + back_pos[b]] = static_cast<std::int32_t>(nc);
            for (std::size_t j = 0; j < w_; ++j)
                if (j != f.pos) records.push_back(facet_record(nc, j));
            if (!is_infinite(nc)) last = nc;
        }
        link_facets(records);
        hint_ = last;
    }

    /// The new cell formed by facet (c, j) and p must be properly oriented.
    bool star_facet_valid(std::size_t c, std::size_t j, std::int32_t p) const {
        const auto* ids = cell(c);
        const std::size_t inf = infinite_position(c);
        if (inf == w_ || inf == j) return orient_replaced(ids, j, p) > 0;
        // New hull facet: the replaced vertex must not lie strictly outside it.
        std::array<std::int32_t, kMaxDims + 1> tmp{};
        std::copy(ids, ids + w_, tmp.begin());
        tmp[j] = p;
        tmp[inf] = ids[j];
        return orient(tmp.data()) <= 0;
    }
};

}  // namespace

SimplicialComplex SimplicialComplex::build(const Matrix& points) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (d == 0 || d > kMaxDims) throw DegenerateInput("dimension must be in [1, 10]");
    if (n < d + 1)
        throw TooFewPoints("need at least " + std::to_string(d + 1) + " points, got " +
                           std::to_string(n));
    for (double v : points.data())
        if (!std::isfinite(v)) throw NonFiniteInput("node coordinates must be finite");

    SimplicialComplex sc;
    sc.dims_ = d;
    sc.offset_.assign(d, 0.0);
    sc.scale_.assign(d, 1.0);
    for (std::size_t k = 0; k < d; ++k) {
        double lo = points(0, k);
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, points(i, k));
            hi = std::max(hi, points(i, k));
        }
        if (!(hi > lo))
            throw DegenerateInput("all points share coordinate " + std::to_string(k));
        sc.offset_[k] = lo;
        sc.scale_[k] = hi - lo;
    }
    sc.points_ = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            sc.points_(i, k) = (points(i, k) - sc.offset_[k]) / sc.scale_[k];

    DelaunayBuilder builder(d, sc.points_);
    builder.run();
    builder.export_to(sc.vertices_, sc.neighbors_);
    return sc;
}

std::vector<double> SimplicialComplex::normalize(std::span<const double> q) const {
    if (q.size() != dims_)
        throw DimensionMismatch("query has " + std::to_string(q.size()) + " coordinates, expected " +
                                std::to_string(dims_));
    std::vector<double> qn(dims_);
    for (std::size_t k = 0; k < dims_; ++k) qn[k] = (q[k] - offset_[k]) / scale_[k];
    return qn;
}

void SimplicialComplex::barycentric(std::size_t s, std::span<const double> qn,
                                    std::span<double> weights) const {
    const std::size_t w = dims_ + 1;
    std::array<double, (kMaxDims + 1) * (kMaxDims + 1)> a{};
    const auto ids = simplex(s);
    for (std::size_t j = 0; j < w; ++j) {
        const auto x = points_.row(static_cast<std::size_t>(ids[j]));
        for (std::size_t k = 0; k < dims_; ++k) a[k * w + j] = x[k];
        a[dims_ * w + j] = 1.0;
    }
    for (std::size_t k = 0; k < dims_; ++k) weights[k] = qn[k];
    weights[dims_] = 1.0;
    solve_linear_inplace(std::span<double>(a.data(), w * w), weights.first(w), w);
}

BarycentricResult SimplicialComplex::scan_normalized(std::span<const double> qn) const {
    std::vector<double> wts(dims_ + 1);
    for (std::size_t s = 0; s < num_simplices(); ++s) {
        barycentric(s, qn, wts);
        if (*std::min_element(wts.begin(), wts.end()) >= -kBarycentricTolerance)
            return {s, wts};
    }
    throw OutsideHull("query is outside the convex hull of the nodes");
}

BarycentricResult SimplicialComplex::locate_scan(std::span<const double> q) const {
    return scan_normalized(normalize(q));
}

BarycentricResult SimplicialComplex::locate(std::span<const double> q) const {
    WalkCursor cursor;
    return locate(q, cursor);
}

BarycentricResult SimplicialComplex::locate(std::span<const double> q, WalkCursor& cursor) const {
    const auto qn = normalize(q);
    for (double v : qn) {
        if (!std::isfinite(v)) throw NonFiniteInput("query has non-finite coordinates");
        if (v < -kBarycentricTolerance || v > 1.0 + kBarycentricTolerance)
            throw OutsideHull("query lies outside the node bounding box");
    }
    const std::size_t total = num_simplices();
    std::size_t cur = cursor.simplex < total ? cursor.simplex : 0;
    std::vector<double> wts(dims_ + 1);
    std::unordered_set<std::size_t> visited;
    for (;;) {
        barycentric(cur, qn, wts);
        const auto it = std::min_element(wts.begin(), wts.end());
        if (*it >= -kBarycentricTolerance) {
            cursor.simplex = cur;
            return {cur, wts};
        }
        const auto nb = neighbors(cur)[static_cast<std::size_t>(it - wts.begin())];
        visited.insert(cur);
        if (nb == kBoundary || visited.count(static_cast<std::size_t>(nb))) break;
        cur = static_cast<std::size_t>(nb);
    }
    auto res = scan_normalized(qn);
    cursor.simplex = res.simplex;
    return res;
}

namespace {

void check_values(const SimplicialComplex& complex, const Matrix& values) {
    if (values.rows() != complex.num_points())
        throw DimensionMismatch("values have " + std::to_string(values.rows()) +
                                " rows, complex has " + std::to_string(complex.num_points()) +
                                " nodes");
}

void accumulate(const SimplicialComplex& complex, const Matrix& values,
                const BarycentricResult& loc, std::span<double> out) {
    const auto ids = complex.simplex(loc.simplex);
    // A query on a node returns that node's values exactly, since roundoff
    // in the other weights would otherwise leak neighbouring magnitudes into
    // near-zero radiances.
    constexpr double kSnap = 1e-12;
    std::size_t hit = ids.size();
    std::size_t small = 0;
    for (std::size_t j = 0; j < ids.size(); ++j) {
        if (std::abs(loc.weights[j] - 1.0) <= kSnap) hit = j;
        else if (std::abs(loc.weights[j]) <= kSnap) ++small;
    }
    if (hit < ids.size() && small + 1 == ids.size()) {
        const auto row = values.row(static_cast<std::size_t>(ids[hit]));
        std::copy(row.begin(), row.end(), out.begin());
        return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < ids.size(); ++j) {
        const double w = loc.weights[j];
        const auto row = values.row(static_cast<std::size_t>(ids[j]));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * row[k];
    }
}

void interpolate_block(const SimplicialComplex& complex, const Matrix& values,
                       const Matrix& queries, std::size_t begin, std::size_t end, Matrix& out,
                       std::vector<std::size_t>& failures) {
    WalkCursor cursor;
    for (std::size_t i = begin; i < end; ++i) {
        try {
            const auto loc = complex.locate(queries.row(i), cursor);
            accumulate(complex, values, loc, out.row(i));
        } catch (const OutsideHull&) {
            auto row = out.row(i);
            std::fill(row.begin(), row.end(), std::numeric_limits<double>::quiet_NaN());
            failures.push_back(i);
        }
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Spectrum interpolate(const SimplicialComplex& complex, const Matrix& values,
                     std::span<const double> q, WalkCursor& cursor) {
    check_values(complex, values);
    const auto loc = complex.locate(q, cursor);
    Spectrum out(values.cols());
    accumulate(complex, values, loc, out);
    return out;
}

Spectrum interpolate(const SimplicialComplex& complex, const Matrix& values,
                     std::span<const double> q) {
    WalkCursor cursor;
    return interpolate(complex, values, q, cursor);
}

BatchResult interpolate_batch_serial(const SimplicialComplex& complex, const Matrix& values,
                                     const Matrix& queries) {
    check_values(complex, values);
    if (queries.rows() > 0 && queries.cols() != complex.dims())
        throw DimensionMismatch("query matrix has the wrong number of columns");
    const auto t0 = std::chrono::steady_clock::now();
    BatchResult res;
    res.spectra = Matrix(queries.rows(), values.cols());
    for (std::size_t b = 0; b < queries.rows(); b += kInterpolationBlock) {
        interpolate_block(complex, values, queries, b,
                          std::min(queries.rows(), b + kInterpolationBlock), res.spectra,
                          res.failures);
    }
    res.seconds = queries.rows() == 0 ? 0.0 : seconds_since(t0);
    return res;
}

BatchResult interpolate_batch(const SimplicialComplex& complex, const Matrix& values,
                              const Matrix& queries) {
    check_values(complex, values);
    if (queries.rows() > 0 && queries.cols() != complex.dims())
        throw DimensionMismatch("query matrix has the wrong number of columns");
    const auto t0 = std::chrono::steady_clock::now();
    BatchResult res;
    res.spectra = Matrix(queries.rows(), values.cols());
    const std::size_t blocks = (queries.rows() + kInterpolationBlock - 1) / kInterpolationBlock;
    std::vector<std::vector<std::size_t>> block_failures(blocks);
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < static_cast<long>(blocks); ++b) {
        const auto begin = static_cast<std::size_t>(b) * kInterpolationBlock;
        interpolate_block(complex, values, queries, begin,
                          std::min(queries.rows(), begin + kInterpolationBlock), res.spectra,
                          block_failures[static_cast<std::size_t>(b)]);
    }
    for (const auto& f : block_failures) res.failures.insert(res.failures.end(), f.begin(), f.end());
    res.seconds = queries.rows() == 0 ? 0.0 : seconds_since(t0);
    return res;
}

}  // namespace lutbench
