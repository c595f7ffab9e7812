// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "capshare/bench/orchestrator.hpp"
#include "capshare/netconf/framing.hpp"
#include "capshare/netconf/rpc.hpp"
#include "capshare/nrm/allocation.hpp"
#include "capshare/odu/service.hpp"
#include "capshare/pm/codec.hpp"
#include "capshare/policy/persistence.hpp"
#include "capshare/policy/trainer.hpp"
#include "capshare/rapp/rapp.hpp"
#include "fig7.hpp"

using namespace capshare;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Wire conformance against the published edit-config listing.
Outcome wire_conformance() {
    const auto t0 = Clock::now();
    const auto reference = xml::parse(testing::fig7_nested());
    const auto built = netconf::build_edit_config(
        std::vector<nrm::RRMPolicyRatio>{{nrm::SNssai{1}, 57}, {nrm::SNssai{2}, 42}},
        reference.attribute("message-id").value_or(""));
    std::string why;
    const bool equal = xml::canonically_equal(built, reference, &why);

    netconf::PolicyDatastore store;
    const auto reply = netconf::apply_edit_config(store, reference);
    const bool ok = reply.child(netconf::kNetconfNs, "ok") != nullptr;
    const auto read = netconf::parse_policy_ratios(netconf::get_config(store));
    const bool values = read == std::vector<nrm::RRMPolicyRatio>{{nrm::SNssai{1}, 57}, {nrm::SNssai{2}, 42}};
    const double secs = seconds_since(t0);
    return {equal && ok && values && secs < 1.0,
            fmt("canonical %s%s, reply %s, get-config %s, %.3f s", equal ? "match" : "mismatch at ",
                equal ? "" : why.c_str(), ok ? "ok" : "error", values ? "57/42" : "wrong", secs)};
}

// 2. Framing, PM file and datastore round-trips on randomized inputs.
Outcome protocol_round_trips() {
    std::mt19937_64 rng(2);
    long framing_failures = 0, pm_failures = 0, store_failures = 0;
    const int cases = 1000;

    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> len(1, 4096), chunk(0, 512);
    for (int i = 0; i < cases; ++i) {
        std::vector<std::string> msgs(1 + i % 3);
        std::string wire;
        for (auto &m : msgs) {
            m.resize(len(rng));
            for (auto &c : m) c = char(byte(rng));
            wire += netconf::encode_chunked(m, chunk(rng));
        }
        netconf::ChunkedDecoder d;
        std::vector<std::string> got;
        for (std::size_t pos = 0; pos < wire.size();) {
            const std::size_t n = std::min<std::size_t>(wire.size() - pos, 1 + chunk(rng));
            for (auto &m : d.feed(std::string_view(wire).substr(pos, n))) got.push_back(m);
            pos += n;
        }
        framing_failures += got != msgs || !d.idle();
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        pm::PmReport r;
        r.cell_id = std::to_string(1 + i % 50);
        r.begin_time = pm::TimePoint(std::chrono::seconds(1'700'000'000 + 180L * i));
        r.granularity_s = 180;
        r.dl_total_available_prb = 1 + 272 * unit(rng);
        double left = r.dl_total_available_prb;
        for (int k = 0; k < i % 5; ++k) {
            const double used = left * unit(rng);
            left -= used;
            r.slices.push_back({nrm::SNssai{std::uint32_t(k + 1)}, used, 1e5 * unit(rng)});
        }
        try {
            pm_failures += pm::parse_pm_report(pm::serialize_pm_report(r)) != r;
        } catch (const std::exception &) {
            ++pm_failures;
        }
    }

    std::uniform_int_distribution<int> ratio(-10, 110), id(1, 4), count(1, 3);
    long sequences = 0;
    for (int trial = 0; trial < 100; ++trial) {
        netconf::PolicyDatastore store;
        std::map<std::uint32_t, int> model;
        for (int op = 0; op < 50; ++op, ++sequences) {
            std::vector<nrm::RRMPolicyRatio> batch;
            bool valid = true;
            for (int n = count(rng); n > 0; --n) {
                batch.push_back({nrm::SNssai{std::uint32_t(id(rng))}, ratio(rng)});
                valid = valid && batch.back().valid();
            }
            xml::Element doc;
            if (valid) {
                doc = netconf::build_edit_config(batch, "m");
            } else {
                // Build with in-range values, then corrupt the text.
                auto legal = batch;
                for (auto &b : legal) b.dedicated_ratio = 0;
                auto text = xml::to_string(netconf::build_edit_config(legal, "m"));
                std::size_t at = 0;
                for (const auto &b : batch) {
                    at = text.find("<rRMPolicyDedicatedRatio>0<", at) + 25;
                    text.replace(at, 1, std::to_string(b.dedicated_ratio));
                }
                doc = xml::parse(text);
            }
            const auto reply = netconf::apply_edit_config(store, doc);
            const bool ok = reply.child(netconf::kNetconfNs, "ok") != nullptr;
            if (ok)
                for (const auto &b : batch) model[b.snssai.id] = b.dedicated_ratio;
            const auto read = netconf::parse_policy_ratios(netconf::get_config(store));
            std::map<std::uint32_t, int> seen;
            for (const auto &r : read) seen[r.snssai.id] = r.dedicated_ratio;
            store_failures += ok != valid || seen != model;
        }
    }
    return {framing_failures == 0 && pm_failures == 0 && store_failures == 0,
            fmt("framing %ld/%d failures, PM file %ld/%d, datastore %ld/%ld edits", framing_failures, cases,
                pm_failures, cases, store_failures, sequences)};
}

// 3. Allocation against an independently written oracle.
Outcome allocation_oracle() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> tenants(1, 5), ratio(0, 100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const int k = tenants(rng);
        const nrm::CellConfig cell{"1", 1 + 999 * u(rng), 106};
        std::vector<double> offered;
        std::vector<nrm::RRMPolicyRatio> ratios;
        std::vector<nrm::TenantSla> slas;
        long sum = 0;
        for (int j = 0; j < k; ++j) {
            offered.push_back(1.5 * cell.capacity_mbps * u(rng));
            ratios.push_back({nrm::SNssai{std::uint32_t(j + 1)}, ratio(rng)});
            slas.push_back({0.0, cell.capacity_mbps * u(rng)});
            sum += ratios.back().dedicated_ratio;
        }
        const auto got = nrm::allocate_capacity(offered, ratios, cell, slas);
        for (int j = 0; j < k; ++j) {
            const double denom = sum > 100 ? double(sum) : 100.0;
            const double share = cell.capacity_mbps * ratios[j].dedicated_ratio / denom;
            double want = offered[j];
            if (share < want) want = share;
            if (slas[j].mcbr_mbps < want) want = slas[j].mcbr_mbps;
            const double rel = want == 0.0 ? std::abs(got[j]) : std::abs(got[j] - want) / std::abs(want);
            worst = std::max(worst, rel);
        }
    }
    return {worst <= 1e-9, fmt("%d instances, worst relative error %.3g", n, worst)};
}

// 4. Q-network gradients against central differences.
Outcome gradient_check() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    const double h = 1e-6;
    for (int draw = 0; draw < 100; ++draw) {
        auto net = policy::QNetwork::random(int(policy::kStateSize), 32, 3, rng);
        for (Eigen::Index i = 0; i < net.b1.size(); ++i) net.b1(i) = 0.1 * u(rng);
        Eigen::MatrixXd state(policy::kStateSize, 1);
        for (Eigen::Index i = 0; i < state.size(); ++i) state(i) = u(rng);
        const auto g = net.backward_batch(state, Eigen::MatrixXd::Ones(3, 1));
        auto f = [&](const policy::QNetwork &n) { return n.forward_batch(state).sum(); };
        auto sweep = [&](auto member, const auto &analytic) {
            for (Eigen::Index i = 0; i < analytic.size(); ++i) {
                auto p = net, m = net;
                (p.*member).reshaped()(i) += h;
                (m.*member).reshaped()(i) -= h;
                const double numeric = (f(p) - f(m)) / (2 * h);
                const double scale = std::max({std::abs(analytic(i)), std::abs(numeric), 1e-3});
                worst = std::max(worst, std::abs(analytic(i) - numeric) / scale);
            }
        };
        sweep(&policy::QNetwork::w1, g.w1.reshaped());
        sweep(&policy::QNetwork::b1, g.b1);
        sweep(&policy::QNetwork::w2, g.w2.reshaped());
        sweep(&policy::QNetwork::b2, g.b2);
    }
    return {worst < 1e-4, fmt("100 draws, worst relative error %.3g", worst)};
}

struct WeekRun {
    bool ran = false;
    std::string error;
    sla::RunReport report;
    double train_s = 0, run_s = 0;
    std::filesystem::path dir;
};

WeekRun run_week(const std::filesystem::path &root) {
    WeekRun w;
    w.dir = root / "week";
    try {
        const auto cfg = config::load_config(CAPSHARE_CONFIG_DIR "/reference.json");
        auto t0 = Clock::now();
        const auto trained = policy::train_policy(cfg.environment(), cfg.training.options, 1);
        w.train_s = seconds_since(t0);
        policy::save_policy(trained.policy, root / "policy");

        bench::RunOptions o;
        o.config = cfg;
        o.policy_dir = root / "policy";
        o.steps = 7 * 86400L / cfg.scenario.delta_t_s;
        o.seed = 1;
        o.out_dir = w.dir;
        o.tools_dir = CAPSHARE_TOOLS_DIR;
        o.free_ports = true;
        t0 = Clock::now();
        w.report = bench::orchestrate_run(o);
        w.run_s = seconds_since(t0);
        w.ran = true;
    } catch (const std::exception &e) {
        w.error = e.what();
    }
    return w;
}

// 5. Notification to rpc-reply under one second, timestamps monotone.
Outcome loop_timing(const WeekRun &w) {
    if (!w.ran) return {false, "week run failed: " + w.error};
    std::ifstream in(w.dir / "rapp_loop.jsonl");
    long records = 0, complete = 0, non_monotone = 0;
    double worst_ms = 0.0, total_ms = 0.0;
    for (std::string line; std::getline(in, line);) {
        const auto r = rapp::parse_loop_record(line);
        ++records;
        non_monotone += !r.timestamps_monotone();
        if (r.status != rapp::LoopStatus::ok || !r.rpc_reply_received) continue;
        ++complete;
        const double ms = double((*r.rpc_reply_received - r.notification_received).count());
        worst_ms = std::max(worst_ms, ms);
        total_ms += ms;
    }
    const bool pass = complete > 0 && worst_ms < 1000.0 && non_monotone == 0;
    return {pass, fmt("%ld/%ld complete iterations, mean %.1f ms, max %.0f ms, %ld non-monotone", complete,
                      records, complete ? total_ms / double(complete) : 0.0, worst_ms, non_monotone)};
}

// 6. Week-long satisfaction and utilization.
Outcome week_metrics(const WeekRun &w) {
    if (!w.ran) return {false, "week run failed: " + w.error};
    const auto &r = w.report;
    bool pass = !r.partial && r.steps == 3360 && w.run_s < 300.0;
    std::string sat;
    for (std::size_t k = 0; k < r.tenants.size(); ++k) {
        pass = pass && r.satisfaction[k] >= 0.90;
        sat += fmt("%sT%u %.3f", k ? ", " : "", r.tenants[k].id, r.satisfaction[k]);
    }
    pass = pass && r.utilization >= 0.70 && r.utilization <= 1.0;
    return {pass, fmt("%zu steps%s, satisfaction %s (>= 0.90), utilization %.3f (in [0.70, 1.0]), "
                      "training %.1f s, week %.1f s (< 300 s)",
                      r.steps, r.partial ? " (partial)" : "", sat.c_str(), r.utilization, w.train_s, w.run_s)};
}

// 7. Trained beats random by 20% on a stationary load; training is reproducible.
Outcome policy_sanity() {
    policy::EnvironmentOptions env;
    env.scenario = nrm::reference_scenario();
    env.profiles = {odu::TrafficProfile::flat(0.15), odu::TrafficProfile::flat(0.10)};
    env.vary_loads = false;
    policy::TrainingOptions o;
    const auto a = policy::train_policy(env, o, 7);
    const auto b = policy::train_policy(env, o, 7);
    const bool identical = policy::serialize_policy(a.policy) == policy::serialize_policy(b.policy);
    const auto greedy = policy::evaluate_policy(env, a.policy, 500, 11);
    const auto random = policy::evaluate_random(env, o.actions, 500, 11);
    const double gain = greedy.mean_reward / random.mean_reward - 1.0;
    return {identical && gain >= 0.20,
            fmt("greedy %.4f vs random %.4f (+%.1f%%, need 20%%), same-seed policies %s", greedy.mean_reward,
                random.mean_reward, 100 * gain, identical ? "bit-identical" : "differ")};
}

// 8. Dedicated shares that cover min(offered, SAGBR) are honoured under congestion.
Outcome congestion_guarantee(const WeekRun &w) {
    if (!w.ran) return {false, "week run failed: " + w.error};
    std::ifstream in(w.dir / "truth.csv");
    const auto records = odu::read_series(in);
    const auto scenario = nrm::reference_scenario();
    const double c = scenario.cell.capacity_mbps;
    long congested = 0, covered = 0, violations = 0;
    for (const auto &r : records) {
        double offered = 0;
        int ratio_sum = 0;
        for (std::size_t k = 0; k < r.offered_mbps.size(); ++k) {
            offered += r.offered_mbps[k];
            ratio_sum += r.ratios[k].dedicated_ratio;
        }
        if (offered <= c || ratio_sum > 100) continue;
        ++congested;
        for (std::size_t k = 0; k < r.offered_mbps.size(); ++k) {
            const double need = std::min(r.offered_mbps[k], scenario.tenants[k].sla.sagbr_mbps);
            if (r.ratios[k].dedicated_ratio * c / 100.0 < need) continue;
            ++covered;
            violations += !(r.served_mbps[k] >= need - 1e-6);
        }
    }
    return {records.size() == 3360 && violations == 0,
            fmt("%ld congested steps, %ld covered tenant-steps, %ld violations", congested, covered, violations)};
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const auto root = std::filesystem::temp_directory_path() / "capshare_acceptance";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);

    struct Criterion {
        int id;
        const char *name;
        std::function<Outcome()> run;
    };
    WeekRun week;
    bool week_done = false;
    auto with_week = [&](auto f) {
        return [&, f] {
            if (!week_done) {
                week = run_week(root);
                week_done = true;
            }
            return f(week);
        };
    };
    const std::vector<Criterion> criteria{
        {1, "wire conformance", wire_conformance},
        {2, "protocol round-trips", protocol_round_trips},
        {3, "allocation oracle", allocation_oracle},
        {4, "gradient check", gradient_check},
        {5, "end-to-end loop timing", with_week(loop_timing)},
        {6, "week scenario reproduction", with_week(week_metrics)},
        {7, "policy-learning sanity", policy_sanity},
        {8, "SLA guarantee under congestion", with_week(congestion_guarantee)},
    };

    int failed = 0;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %d %s: %s (%s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("artifacts in %s\n", root.c_str());
    return failed == 0 ? 0 : 1;
}
