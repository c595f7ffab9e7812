#include "capshare/policy/features.hpp"

#include <algorithm>
#include <cmath>

#include "capshare/nrm/allocation.hpp"

namespace capshare::policy {

namespace {

double unit(double v) { return std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0); }

} // namespace

StateVector featurize(const pm::PmReport &report, const nrm::TenantSla &sla,
                      const nrm::RRMPolicyRatio &ratio, const nrm::CellConfig &cell,
                      double delta_t_s) {
    const double available = report.dl_total_available_prb;
    if (!(available > 0.0)) throw DegenerateInputError("PM report has no available PRBs");
    if (!(cell.capacity_mbps > 0.0)) throw DegenerateInputError("cell capacity must be positive");
    if (!(sla.sagbr_mbps > 0.0)) throw DegenerateInputError("SAGBR must be positive");

    const auto *own = report.find(ratio.snssai);
    if (own == nullptr)
        throw DegenerateInputError("PM report has no measurements for snssai " +
                                   std::to_string(ratio.snssai.id));

    double used_total = 0.0;
    for (const auto &s : report.slices) used_total += s.mean_dl_prb_used;
    const double used_own = own->mean_dl_prb_used;
    const double throughput = nrm::throughput_from_volume(own->dl_pdcp_volume_mbit, delta_t_s);

    return StateVector{
        unit(ratio.dedicated_ratio / 100.0),
        unit(used_own / available),
        unit((used_total - used_own) / available),
        unit(1.0 - used_total / available),
        std::clamp(throughput / sla.sagbr_mbps, 0.0, kThroughputFeatureCap),
        unit(sla.sagbr_mbps / cell.capacity_mbps),
        unit(sla.mcbr_mbps / cell.capacity_mbps),
    };
}

FeatureNormalization FeatureNormalization::standard() {
    FeatureNormalization n;
    n.shift.fill(0.5);
    n.scale.fill(2.0);
    n.shift[4] = 1.0;
    n.scale[4] = 1.0;
    return n;
}

StateVector FeatureNormalization::apply(const StateVector &s) const {
    StateVector out;
    for (std::size_t i = 0; i < kStateSize; ++i) out[i] = (s[i] - shift[i]) * scale[i];
    return out;
}

} // namespace capshare::policy
