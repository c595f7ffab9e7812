#pragma once

#include <array>
#include <random>
#include <string>

namespace capshare::odu {

using Rng = std::mt19937_64;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerWeek = 7 * kSecondsPerDay;

/// Weekly offered-load curve, one hourly control point per day (Monday first),
/// as a fraction of cell capacity. Evaluation interpolates linearly between
/// consecutive control points, wrapping Sunday 23:00 onto Monday 00:00.
struct TrafficProfile {
    std::array<std::array<double, 24>, 7> hourly{};
    double noise_std = 0.02;

    static TrafficProfile flat(double fraction, double noise_std = 0.02);
    static TrafficProfile weekly(const std::array<double, 24> &weekday,
                                 const std::array<double, 24> &weekend, double noise_std = 0.02);

    // eMBB: weekday-morning peak near 0.8, much quieter weekend.
    static TrafficProfile embb();
    // FWA: residential, rising through the evening to about 0.55.
    static TrafficProfile fwa();

    /// Noise-free curve value at virtual time t (seconds since Monday 00:00).
    double fraction_at(double t_s) const;
    void scale(double factor);

    // Control points must lie in [0, 1.2]; noise_std >= 0.
    bool valid() const;
};

/// Throws std::invalid_argument for names other than "embb", "fwa", "flat:<x>".
TrafficProfile builtin_profile(const std::string &name);

/// Offered load in Mb/s: curve value times capacity plus N(0, noise_std * capacity),
/// clamped at zero. Draws from rng only when noise_std > 0.
double offered_load(const TrafficProfile &profile, double t_s, double capacity_mbps, Rng &rng);

} // namespace capshare::odu
