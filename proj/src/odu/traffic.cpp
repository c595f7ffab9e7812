#include "capshare/odu/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capshare::odu {

namespace {

// Hourly control points, 00:00 .. 23:00.
constexpr std::array<double, 24> kEmbbWeekday = {
    0.15, 0.10, 0.08, 0.07, 0.07, 0.08, 0.15, 0.30, 0.50, 0.68, 0.78, 0.80,
    0.78, 0.72, 0.68, 0.66, 0.62, 0.55, 0.45, 0.38, 0.33, 0.30, 0.25, 0.20};
constexpr std::array<double, 24> kEmbbWeekend = {
    0.18, 0.12, 0.09, 0.07, 0.07, 0.07, 0.09, 0.13, 0.20, 0.28, 0.35, 0.40,
    0.40, 0.38, 0.35, 0.33, 0.33, 0.32, 0.30, 0.28, 0.27, 0.26, 0.24, 0.21};
constexpr std::array<double, 24> kFwaWeekday = {
    0.40, 0.30, 0.20, 0.12, 0.10, 0.10, 0.12, 0.18, 0.20, 0.20, 0.20, 0.22,
    0.25, 0.28, 0.33, 0.38, 0.43, 0.48, 0.52, 0.55, 0.56, 0.56, 0.52, 0.47};
constexpr std::array<double, 24> kFwaWeekend = {
    0.42, 0.33, 0.22, 0.14, 0.11, 0.10, 0.11, 0.15, 0.22, 0.28, 0.32, 0.34,
    0.35, 0.35, 0.36, 0.38, 0.42, 0.46, 0.50, 0.54, 0.56, 0.55, 0.52, 0.47};

} // namespace

TrafficProfile TrafficProfile::flat(double fraction, double noise_std) {
    TrafficProfile p;
    for (auto &day : p.hourly) day.fill(fraction);
    p.noise_std = noise_std;
    return p;
}

TrafficProfile TrafficProfile::weekly(const std::array<double, 24> &weekday,
                                      const std::array<double, 24> &weekend, double noise_std) {
    TrafficProfile p;
    for (int d = 0; d < 7; ++d) p.hourly[d] = d < 5 ? weekday : weekend;
    p.noise_std = noise_std;
    return p;
}

TrafficProfile TrafficProfile::embb() { return weekly(kEmbbWeekday, kEmbbWeekend); }
TrafficProfile TrafficProfile::fwa() { return weekly(kFwaWeekday, kFwaWeekend); }

double TrafficProfile::fraction_at(double t_s) const {
    double w = std::fmod(t_s, kSecondsPerWeek);
    if (w < 0) w += kSecondsPerWeek;
    const double hours = w / 3600.0;
    const int idx = std::min(int(hours), 7 * 24 - 1);
    const int next = (idx + 1) % (7 * 24);
    const double frac = hours - idx;
    const double a = hourly[idx / 24][idx % 24];
    const double b = hourly[next / 24][next % 24];
    return a + (b - a) * frac;
}

void TrafficProfile::scale(double factor) {
    for (auto &day : hourly)
        for (auto &v : day) v = std::clamp(v * factor, 0.0, 1.2);
}

bool TrafficProfile::valid() const {
    if (!(noise_std >= 0.0)) return false;
    for (const auto &day : hourly)
        for (double v : day)
            if (!(v >= 0.0 && v <= 1.2)) return false;
    return true;
}

TrafficProfile builtin_profile(const std::string &name) {
    if (name == "embb") return TrafficProfile::embb();
    if (name == "fwa") return TrafficProfile::fwa();
    if (name.rfind("flat:", 0) == 0) return TrafficProfile::flat(std::stod(name.substr(5)));
    throw std::invalid_argument("unknown traffic profile '" + name + "'");
}

double offered_load(const TrafficProfile &profile, double t_s, double capacity_mbps, Rng &rng) {
    double load = profile.fraction_at(t_s) * capacity_mbps;
    if (profile.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, profile.noise_std * capacity_mbps);
        load += noise(rng);
    }
    return std::max(load, 0.0);
}

} // namespace capshare::odu
