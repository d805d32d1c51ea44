#include "dito/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dito {

namespace {

// Largest slice for which the construction-time separation check is run.
constexpr std::uint64_t kSeparationCheckLimit = std::uint64_t{1} << 21;

std::uint64_t checked_binomial(std::uint64_t a, std::uint64_t b) {
    if (b > a) return 0;
    b = std::min(b, a - b);
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= b; ++i) {
        // result * (a - b + i) / i stays integral at every step.
        result = result * (a - b + i) / i;
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            throw LatticeError("binomial(" + std::to_string(a) + ", " + std::to_string(b) +
                               ") overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(result);
}

void check_node(const LatticeNode& node) {
    if (node.counts.size() < 2) throw LatticeError("node needs at least two count slots");
    long sum = 0;
    for (int c : node.counts) {
        if (c < 0) throw LatticeError("negative jump count");
        sum += c;
    }
    if (sum != node.depth) throw LatticeError("jump counts do not sum to the node depth");
}

}  // namespace

int LatticeConfig::depth() const {
    // The small guard keeps products such as 0.29 * 100 on the intended integer.
    return static_cast<int>(std::floor(T * N + 1e-9));
}

std::uint64_t slice_size(int n, int k) {
    if (n < 1 || k < 0) throw InvalidArgument("slice_size: need n >= 1 and k >= 0");
    return checked_binomial(static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(n));
}

std::uint64_t rank(const LatticeNode& node) {
    check_node(node);
    const int n = static_cast<int>(node.counts.size()) - 1;
    std::uint64_t r = 0;
    int w = node.depth;
    for (int i = n; i >= 1; --i) {
        const int ki = node.counts[static_cast<std::size_t>(i)];
        r += checked_binomial(static_cast<std::uint64_t>(w + i), static_cast<std::uint64_t>(i)) -
             checked_binomial(static_cast<std::uint64_t>(w - ki + i), static_cast<std::uint64_t>(i));
        w -= ki;
    }
    return r;
}

LatticeNode unrank(int n, int depth, std::uint64_t r) {
    if (r >= slice_size(n, depth)) {
        throw LatticeError("rank " + std::to_string(r) + " out of range for slice of depth " +
                           std::to_string(depth));
    }
    LatticeNode node{depth, Counts(static_cast<std::size_t>(n + 1), 0)};
    int w = depth;
    for (int i = n; i >= 1; --i) {
        const auto top = checked_binomial(static_cast<std::uint64_t>(w + i), static_cast<std::uint64_t>(i));
        int m = 0;
        while (m < w && top - checked_binomial(static_cast<std::uint64_t>(w - (m + 1) + i),
                                               static_cast<std::uint64_t>(i)) <= r) {
            ++m;
        }
        r -= top - checked_binomial(static_cast<std::uint64_t>(w - m + i), static_cast<std::uint64_t>(i));
        node.counts[static_cast<std::size_t>(i)] = m;
        w -= m;
    }
    node.counts[0] = w;
    return node;
}

bool next_counts(Counts& counts) {
    const std::size_t last = counts.size() - 1;
    std::size_t i = 0;
    while (i <= last && counts[i] == 0) ++i;
    if (i >= last) return false;
    const int rest = counts[i] - 1;
    counts[i] = 0;
    counts[i + 1] += 1;
    counts[0] = rest;
    return true;
}

std::vector<LatticeNode> children(const LatticeNode& node) {
    check_node(node);
    std::vector<LatticeNode> out;
    out.reserve(node.counts.size());
    for (std::size_t j = 0; j < node.counts.size(); ++j) {
        LatticeNode child{node.depth + 1, node.counts};
        child.counts[j] += 1;
        out.push_back(std::move(child));
    }
    return out;
}

Point position(const OrthoBasis& basis, const LatticeConfig& config, const LatticeNode& node) {
    check_node(node);
    if (static_cast<int>(node.counts.size()) != basis.states()) {
        throw LatticeError("node dimension does not match basis");
    }
    Point sum = Point::Zero(basis.n());
    for (int j = 0; j < basis.states(); ++j) sum += node.counts[static_cast<std::size_t>(j)] * basis.jump(j);
    return config.x0 + config.step() * sum;
}

Lattice::Lattice(OrthoBasis basis, LatticeConfig config)
    : basis_(std::move(basis)), config_(std::move(config)), depth_(0) {
    if (config_.N < 1) throw InvalidArgument("lattice: N must be >= 1");
    if (!(config_.T > 0.0)) throw InvalidArgument("lattice: T must be positive");
    if (config_.x0.size() == 0) config_.x0 = Point::Zero(basis_.n());
    if (config_.x0.size() != basis_.n()) throw InvalidArgument("lattice: x0 has the wrong dimension");
    depth_ = config_.depth();
    if (depth_ < 1) throw InvalidArgument("lattice: floor(T N) must be >= 1");

    const int n = basis_.n();
    (void)::dito::slice_size(n, depth_);  // overflow check
    binom_.assign(static_cast<std::size_t>(depth_ + n + 2), {});
    for (int a = 0; a < depth_ + n + 2; ++a) {
        auto& row = binom_[static_cast<std::size_t>(a)];
        row.assign(static_cast<std::size_t>(n + 2), 0);
        for (int b = 0; b <= std::min(a, n + 1); ++b) {
            row[static_cast<std::size_t>(b)] = checked_binomial(static_cast<std::uint64_t>(a),
                                                                static_cast<std::uint64_t>(b));
        }
    }

    // Distinct count vectors of equal weight map to distinct points for every
    // valid basis, but a badly conditioned one can make them numerically
    // indistinguishable. Differences realizable at depth k are realizable at any
    // deeper slice, so checking the deepest affordable slice covers the rest.
    int check_depth = depth_;
    while (check_depth > 1 && slice_size(check_depth) > kSeparationCheckLimit) --check_depth;
    std::vector<Point> pts;
    pts.reserve(slice_size(check_depth));
    for_each_node(check_depth, [&](std::uint64_t, const Counts& c) { pts.push_back(position(c)); });
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a(0) < b(0); });
    const double tol = 1e-9 * config_.step();
    // Pairs further apart than one lattice step are not of interest.
    min_separation_ = config_.step();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[j](0) - pts[i](0) > min_separation_) break;
            min_separation_ = std::min(min_separation_, (pts[j] - pts[i]).norm());
        }
    }
    if (min_separation_ <= tol) {
        throw LatticeError("lattice: distinct nodes share a position at depth " +
                           std::to_string(check_depth) + "; basis is numerically degenerate");
    }
}

std::uint64_t Lattice::binom(int a, int b) const {
    return binom_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

std::uint64_t Lattice::slice_size(int k) const { return binom(k + n(), n()); }

std::uint64_t Lattice::rank(const Counts& counts) const { return child_rank(counts, -1); }

std::uint64_t Lattice::child_rank(const Counts& counts, int j) const {
    int w = (j >= 0) ? 1 : 0;
    for (int c : counts) w += c;
    std::uint64_t r = 0;
    for (int i = n(); i >= 1; --i) {
        const int ki = counts[static_cast<std::size_t>(i)] + (i == j ? 1 : 0);
        r += binom(w + i, i) - binom(w - ki + i, i);
        w -= ki;
    }
    return r;
}

Point Lattice::position(const Counts& counts) const {
    Point sum = Point::Zero(n());
    for (int j = 0; j <= n(); ++j) sum += counts[static_cast<std::size_t>(j)] * basis_.jump(j);
    return config_.x0 + config_.step() * sum;
}

void Lattice::for_each_node(int k, const std::function<void(std::uint64_t, const Counts&)>& visit) const {
    Counts c(static_cast<std::size_t>(n() + 1), 0);
    c[0] = k;
    std::uint64_t r = 0;
    do {
        visit(r++, c);
    } while (next_counts(c));
}

}  // namespace dito
