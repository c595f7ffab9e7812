#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "capshare/nrm/allocation.hpp"

using namespace capshare::nrm;
using Catch::Approx;

namespace {

const CellConfig kCell{"1", 117.0, 106};
const std::vector<TenantSla> kSlas{{70.2, 93.6}, {46.8, 93.6}};

std::vector<RRMPolicyRatio> ratios(std::initializer_list<int> values) {
    std::vector<RRMPolicyRatio> out;
    std::uint32_t id = 1;
    for (int v : values) out.push_back({SNssai{id++}, v});
    return out;
}

bool has_violation(const std::vector<std::string> &v, const std::string &what) {
    return std::any_of(v.begin(), v.end(), [&](const auto &s) { return s.find(what) != std::string::npos; });
}

// Written straight from the definition: each tenant's share is its ratio of the
// cell, and when the ratios overrun 100% the cell is split in proportion to them.
std::vector<double> oracle(const std::vector<double> &offered, const std::vector<int> &r, double c,
                           const std::vector<double> &mcbr) {
    long sum = 0;
    for (int v : r) sum += v;
    std::vector<double> out;
    for (std::size_t k = 0; k < r.size(); ++k) {
        double share = sum > 100 ? c * double(r[k]) / double(sum) : c * double(r[k]) / 100.0;
        double s = offered[k];
        if (share < s) s = share;
        if (mcbr[k] < s) s = mcbr[k];
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("allocation serves the min of demand, dedicated share and MCBR", "[nrm]") {
    const std::vector<double> offered{90, 30};
    const auto served = allocate_capacity(offered, ratios({60, 40}), kCell, kSlas);
    CHECK(served[0] == Approx(70.2).epsilon(1e-12));
    CHECK(served[1] == Approx(30.0).epsilon(1e-12));
}

TEST_CASE("allocation with zero demand serves nothing", "[nrm]") {
    const std::vector<double> offered{0, 0};
    for (auto r : {ratios({0, 0}), ratios({60, 40}), ratios({100, 100})}) {
        const auto served = allocate_capacity(offered, r, kCell, kSlas);
        CHECK(served == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("allocation at the edit-config ratios under full demand", "[nrm]") {
    const std::vector<double> offered{117, 117};
    const auto served = allocate_capacity(offered, ratios({57, 42}), kCell, kSlas);
    CHECK(served[0] == Approx(66.69).epsilon(1e-12));
    CHECK(served[1] == Approx(49.14).epsilon(1e-12));
}

TEST_CASE("oversubscribed ratios are scaled down to the cell", "[nrm]") {
    const auto eff = effective_ratios(ratios({80, 70}));
    CHECK(eff[0] + eff[1] == Approx(100.0));
    CHECK(eff[0] / eff[1] == Approx(80.0 / 70.0));
    const auto fit = effective_ratios(ratios({57, 42}));
    CHECK(fit == std::vector<double>{57.0, 42.0});
}

TEST_CASE("allocation rejects malformed input", "[nrm]") {
    const std::vector<double> two{1, 1}, one{1}, negative{-1, 1};
    CHECK_THROWS_AS(allocate_capacity(one, ratios({50, 50}), kCell, kSlas), ConfigurationError);
    CHECK_THROWS_AS(allocate_capacity(negative, ratios({50, 50}), kCell, kSlas), DomainError);
    CHECK_THROWS_AS(allocate_capacity(two, ratios({101, 0}), kCell, kSlas), ConfigurationError);
    CHECK_THROWS_AS(allocate_capacity(two, ratios({50, 50}), CellConfig{"1", 0.0, 106}, kSlas),
                    ConfigurationError);
}

TEST_CASE("allocation matches a brute-force oracle on random instances", "[nrm][property]") {
    std::mt19937_64 rng(20240101);
    std::uniform_int_distribution<int> tenants(1, 6), ratio(0, 100);
    std::uniform_real_distribution<double> cap(1.0, 1000.0), frac(0.0, 1.5), coin(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const int n = tenants(rng);
        const CellConfig cell{"1", cap(rng), 106};
        std::vector<double> offered, mcbr;
        std::vector<int> r;
        std::vector<TenantSla> slas;
        for (int k = 0; k < n; ++k) {
            // Exact zeros and loads far past the cell both show up.
            offered.push_back(coin(rng) < 0.1 ? 0.0 : frac(rng) * cell.capacity_mbps);
            r.push_back(coin(rng) < 0.05 ? 0 : ratio(rng));
            mcbr.push_back(frac(rng) * cell.capacity_mbps);
            slas.push_back({0.0, mcbr.back()});
        }
        std::vector<RRMPolicyRatio> rr;
        for (int k = 0; k < n; ++k) rr.push_back({SNssai{std::uint32_t(k + 1)}, r[k]});
        const auto got = allocate_capacity(offered, rr, cell, slas);
        const auto want = oracle(offered, r, cell.capacity_mbps, mcbr);
        REQUIRE(got.size() == want.size());
        for (int k = 0; k < n; ++k) {
            const double scale = std::max(std::abs(want[k]), 1e-300);
            REQUIRE(std::abs(got[k] - want[k]) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("allocation never exceeds demand, MCBR or the cell", "[nrm][property]") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> ratio(0, 100);
    std::uniform_real_distribution<double> load(0.0, 200.0);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> offered{load(rng), load(rng)};
        const auto r = ratios({ratio(rng), ratio(rng)});
        const auto served = allocate_capacity(offered, r, kCell, kSlas);
        double total = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            REQUIRE(served[k] >= 0.0);
            REQUIRE(served[k] <= offered[k]);
            REQUIRE(served[k] <= kSlas[k].mcbr_mbps);
            total += served[k];
        }
        REQUIRE(total <= kCell.capacity_mbps * (1.0 + 1e-12));
    }
}

TEST_CASE("throughput is volume over the period", "[nrm]") {
    CHECK(throughput_from_volume(12636.0, 180.0) == Approx(70.2).epsilon(1e-12));
    CHECK(throughput_from_volume(0.0, 180.0) == 0.0);
    CHECK(throughput_from_volume(180.0, 180.0) == 1.0);
    CHECK_THROWS_AS(throughput_from_volume(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(throughput_from_volume(-1.0, 180.0), DomainError);
}

TEST_CASE("reference scenario validates", "[nrm]") {
    const auto s = reference_scenario();
    CHECK(validate_scenario(s).empty());
    CHECK(s.cell.capacity_mbps == 117.0);
    CHECK(s.tenants[0].sla == TenantSla{70.2, 93.6});
    CHECK(s.tenants[1].sla == TenantSla{46.8, 93.6});
    CHECK(s.delta_t_s == 180);
    CHECK(s.action_step_pct == 3);
}

TEST_CASE("scenario validation names each violation", "[nrm]") {
    auto s = reference_scenario();
    s.tenants[0].sla = {100.0, 50.0};
    CHECK(has_violation(validate_scenario(s), "sagbr exceeds mcbr"));

    s = reference_scenario();
    s.tenants[1].snssai = SNssai{1};
    CHECK(has_violation(validate_scenario(s), "duplicate snssai"));

    s = reference_scenario();
    s.tenants[0].initial_ratio = 70;
    CHECK(has_violation(validate_scenario(s), "sum of initial ratios exceeds 100"));

    s = reference_scenario();
    s.cell.capacity_mbps = 0.0;
    CHECK(has_violation(validate_scenario(s), "nonpositive cell capacity"));
}
