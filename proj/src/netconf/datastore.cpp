#include "capshare/netconf/datastore.hpp"

#include <algorithm>

namespace capshare::netconf {

bool PolicyDatastore::write(std::span<const nrm::RRMPolicyRatio> ratios) {
    if (!std::all_of(ratios.begin(), ratios.end(), [](const auto &r) { return r.valid(); }))
        return false;
    {
        std::lock_guard lock(mutex_);
        for (const auto &r : ratios) entries_[r.snssai.id] = r.dedicated_ratio;
        ++revision_;
    }
    changed_.notify_all();
    return true;
}

std::optional<int> PolicyDatastore::ratio(nrm::SNssai id) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(id.id);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<nrm::RRMPolicyRatio> PolicyDatastore::entries() const {
    std::lock_guard lock(mutex_);
    std::vector<nrm::RRMPolicyRatio> out;
    out.reserve(entries_.size());
    for (const auto &[id, value] : entries_) out.push_back({nrm::SNssai{id}, value});
    return out;
}

PolicyDatastore::Snapshot PolicyDatastore::snapshot() const {
    std::lock_guard lock(mutex_);
    return Snapshot{entries_, revision_};
}

std::uint64_t PolicyDatastore::revision() const {
    std::lock_guard lock(mutex_);
    return revision_;
}

bool PolicyDatastore::wait_for_revision_after(std::uint64_t seen,
                                              std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    return changed_.wait_for(lock, timeout, [&] { return revision_ > seen; });
}

} // namespace capshare::netconf
