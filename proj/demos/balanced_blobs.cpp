// Overlapping blobs with size bounds and links: Lloyd vs the constrained fit.
#include <algorithm>
#include <cstdio>

#include "bckm.hpp"

namespace {

void report(const char* name, const bckm::FitResult& res, const bckm::SynthInstance& inst) {
    auto sizes = res.labels.cluster_sizes();
    auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    auto violations = bckm::audit(bckm::assignment_from_labels(res.labels), inst.constraints);
    std::printf("%-6s nmi %.4f  wcss %10.3f  sizes %d..%d  link violations %zu  %.2f s\n", name,
                bckm::nmi(res.labels, inst.generated.truth), res.wcss, *lo, *hi, violations.link_violation_count(),
                res.seconds);
}

} // namespace

int main() {
    bckm::SynthSpec spec;
    spec.k = 20;
    spec.n = 25;
    spec.d = 512;
    spec.sigma = 0.5;
    spec.seed = 1;
    auto inst = bckm::make_instance(spec);
    std::printf("%d points in %d dims, %zu must-links, %zu cannot-links, every cluster needs >= %d points\n",
                static_cast<int>(inst.generated.data.size()), spec.d, inst.constraints.must_link.size(),
                inst.constraints.cannot_link.size(), spec.n);

    auto km = bckm::lloyd(inst.generated.data, spec.k, {10, 100, spec.seed});
    report("lloyd", km, inst);

    bckm::BckmConfig cfg;
    cfg.seed = spec.seed;
    auto ours = bckm::fit(inst.generated.data, inst.constraints, cfg);
    report("bckm", ours, inst);
    return 0;
}
