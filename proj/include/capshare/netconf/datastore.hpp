#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "capshare/nrm/types.hpp"

namespace capshare::netconf {

/// Running datastore holding one rRMPolicyRatio per S-NSSAI.
///
/// Shared between the NETCONF server session thread (writer) and the O-DU
/// stepping loop (reader). All access is serialized by an internal mutex.
class PolicyDatastore {
public:
    struct Snapshot {
        std::map<std::uint32_t, int> entries;
        std::uint64_t revision = 0;

        bool operator==(const Snapshot &) const = default;
    };

    PolicyDatastore() = default;
    PolicyDatastore(const PolicyDatastore &) = delete;
    PolicyDatastore &operator=(const PolicyDatastore &) = delete;

    /// Writes every ratio or none. Returns false (store untouched) if any ratio
    /// is outside [0,100]. A successful write bumps the revision by one.
    bool write(std::span<const nrm::RRMPolicyRatio> ratios);

    std::optional<int> ratio(nrm::SNssai id) const;
    std::vector<nrm::RRMPolicyRatio> entries() const;
    Snapshot snapshot() const;
    std::uint64_t revision() const;

    /// Blocks until the revision moves past `seen` or the timeout expires.
    bool wait_for_revision_after(std::uint64_t seen, std::chrono::milliseconds timeout) const;

private:
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::uint32_t, int> entries_;
    std::uint64_t revision_ = 0;
};

} // namespace capshare::netconf
