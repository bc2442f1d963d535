#ifndef BCKM_SYNTHGEN_HPP
#define BCKM_SYNTHGEN_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "constraints.hpp"
#include "core.hpp"
#include "random.hpp"

/**
 * @file synthgen.hpp
 *
 * @brief Gaussian blob benchmark: k centers uniform in [-1, 1]^d, n points
 * per center drawn from N(mu, sigma^2 I), balanced size bounds, and
 * must-link / cannot-link pairs sampled from a fraction of each cluster.
 *
 * Centers, points and links draw from substreams 0, 1 and 2 of the seed.
 */

namespace bckm {

struct SynthSpec {
    int k = 10;
    int n = 50;
    int d = 512;
    /// Standard deviation of every coordinate.
    double sigma = 0.1;
    double link_fraction = 0.2;
    std::uint64_t seed = 0;

    void validate() const {
        if (k < 1 || n < 1 || d < 1) {
            throw InvalidArgument("k, n and d must be at least 1");
        }
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InvalidArgument("sigma must be positive");
        }
        if (!(link_fraction >= 0.0 && link_fraction <= 1.0)) {
            throw InvalidArgument("link_fraction must lie in [0, 1]");
        }
    }
};

struct SynthData {
    DataMatrix data;
    LabelVector truth;
    /// The k x d centers, one per column.
    Matrix centers;
};

/// Points are grouped by cluster: cluster i occupies columns [i n, (i + 1) n).
inline SynthData generate(const SynthSpec& spec) {
    spec.validate();
    Rng center_rng = Rng::substream(spec.seed, 0);
    Rng point_rng = Rng::substream(spec.seed, 1);
    Matrix centers(spec.d, spec.k);
    for (int i = 0; i < spec.k; ++i) {
        for (int r = 0; r < spec.d; ++r) {
            centers(r, i) = center_rng.uniform(-1.0, 1.0);
        }
    }
    const Index total = static_cast<Index>(spec.k) * spec.n;
    Matrix x(spec.d, total);
    std::vector<int> truth(static_cast<std::size_t>(total));
    for (int i = 0; i < spec.k; ++i) {
        for (int t = 0; t < spec.n; ++t) {
            const Index j = static_cast<Index>(i) * spec.n + t;
            for (int r = 0; r < spec.d; ++r) {
                x(r, j) = centers(r, i) + spec.sigma * point_rng.normal();
            }
            truth[static_cast<std::size_t>(j)] = i;
        }
    }
    return {DataMatrix(std::move(x)), LabelVector(std::move(truth), spec.k), std::move(centers)};
}

/**
 * Samples floor(fraction * size) points from every cluster. Sampled points
 * of one cluster are chained by must-links; the t-th sampled points of
 * clusters i and i + 1 are joined by a cannot-link.
 */
inline ConstraintSet sample_links(const LabelVector& truth, double link_fraction, std::uint64_t seed) {
    if (!(link_fraction >= 0.0 && link_fraction <= 1.0)) {
        throw InvalidArgument("link_fraction must lie in [0, 1]");
    }
    const int k = truth.num_clusters();
    ConstraintSet cs = ConstraintSet::unconstrained(k);
    Rng rng = Rng::substream(seed, 2);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < truth.size(); ++j) {
        members[static_cast<std::size_t>(truth[j])].push_back(static_cast<int>(j));
    }
    std::vector<std::vector<int>> sampled(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        auto& pool = members[static_cast<std::size_t>(i)];
        auto take = static_cast<std::size_t>(std::floor(link_fraction * static_cast<double>(pool.size()) + 1e-9));
        rng.shuffle(pool);
        sampled[static_cast<std::size_t>(i)].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    }
    for (const auto& group : sampled) {
        for (std::size_t t = 1; t < group.size(); ++t) {
            cs.must_link.push_back({group[t - 1], group[t]});
        }
    }
    for (int i = 0; i + 1 < k; ++i) {
        const auto& a = sampled[static_cast<std::size_t>(i)];
        const auto& b = sampled[static_cast<std::size_t>(i) + 1];
        for (std::size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
            cs.cannot_link.push_back({a[t], b[t]});
        }
    }
    return cs;
}

/// Lower bound n for every cluster, no upper bounds.
inline ConstraintSet balanced_bounds(int k, int n) {
    if (k < 1 || n < 0) {
        throw InvalidArgument("balanced_bounds needs k >= 1 and n >= 0");
    }
    ConstraintSet cs = ConstraintSet::unconstrained(k);
    cs.lower.assign(static_cast<std::size_t>(k), n);
    return cs;
}

struct SynthInstance {
    SynthData generated;
    ConstraintSet constraints;
};

/// generate() plus balanced bounds and sampled links.
inline SynthInstance make_instance(const SynthSpec& spec) {
    SynthInstance inst{generate(spec), balanced_bounds(spec.k, spec.n)};
    ConstraintSet links = sample_links(inst.generated.truth, spec.link_fraction, spec.seed);
    inst.constraints.must_link = std::move(links.must_link);
    inst.constraints.cannot_link = std::move(links.cannot_link);
    return inst;
}

} // namespace bckm

#endif
