#include "capshare/config/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "capshare/nrm/allocation.hpp"

namespace capshare::config {

namespace {

using nlohmann::json;
using nrm::ConfigurationError;

void check_keys(const json &j, std::string_view section, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ConfigurationError(std::string(section) + " must be an object");
    for (const auto &[k, v] : j.items()) {
        bool known = false;
        for (auto key : keys) known = known || key == k;
        if (!known) throw ConfigurationError("unknown key '" + k + "' in " + std::string(section));
    }
}

template <class T> void read(const json &j, const char *key, T &out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_ms(const json &j, const char *key, std::chrono::milliseconds &out) {
    if (j.contains(key)) out = std::chrono::milliseconds(j.at(key).get<long>());
}

nrm::ScenarioConfig parse_scenario(const json &j) {
    check_keys(j, "scenario", {"cell", "tenants", "delta_t_s", "action_step_pct"});
    nrm::ScenarioConfig s = nrm::reference_scenario();
    if (j.contains("cell")) {
        const auto &c = j.at("cell");
        check_keys(c, "scenario.cell", {"cell_id", "capacity_mbps", "total_prb"});
        read(c, "cell_id", s.cell.cell_id);
        read(c, "capacity_mbps", s.cell.capacity_mbps);
        read(c, "total_prb", s.cell.total_prb);
    }
    read(j, "delta_t_s", s.delta_t_s);
    read(j, "action_step_pct", s.action_step_pct);
    if (j.contains("tenants")) {
        s.tenants.clear();
        for (const auto &t : j.at("tenants")) {
            check_keys(t, "scenario.tenants[]",
                       {"snssai", "sagbr_mbps", "mcbr_mbps", "initial_ratio", "traffic_profile"});
            nrm::TenantConfig tc;
            tc.snssai.id = t.at("snssai").get<std::uint32_t>();
            tc.sla.sagbr_mbps = t.at("sagbr_mbps").get<double>();
            tc.sla.mcbr_mbps = t.at("mcbr_mbps").get<double>();
            read(t, "initial_ratio", tc.initial_ratio);
            tc.traffic_profile = t.value("traffic_profile", std::string("flat:0.5"));
            s.tenants.push_back(tc);
        }
    }
    return s;
}

odu::TrafficProfile parse_profile(const json &j, const std::string &name) {
    check_keys(j, "profiles." + name, {"weekday", "weekend", "days", "noise_std"});
    odu::TrafficProfile p;
    if (j.contains("days")) {
        const auto days = j.at("days").get<std::vector<std::vector<double>>>();
        if (days.size() != 7) throw ConfigurationError("profile " + name + ": days needs 7 rows");
        for (std::size_t d = 0; d < 7; ++d) {
            if (days[d].size() != 24) throw ConfigurationError("profile " + name + ": 24 values per day");
            std::copy(days[d].begin(), days[d].end(), p.hourly[d].begin());
        }
    } else {
        auto day = [&](const char *key) {
            const auto v = j.at(key).get<std::vector<double>>();
            if (v.size() != 24) throw ConfigurationError("profile " + name + ": " + key + " needs 24 values");
            std::array<double, 24> out{};
            std::copy(v.begin(), v.end(), out.begin());
            return out;
        };
        p = odu::TrafficProfile::weekly(day("weekday"), day("weekend"));
    }
    read(j, "noise_std", p.noise_std);
    if (!p.valid()) throw ConfigurationError("profile " + name + " has values outside its range");
    return p;
}

policy::OptimizerKind parse_optimizer(const std::string &s) {
    if (s == "sgd") return policy::OptimizerKind::sgd;
    if (s == "adam") return policy::OptimizerKind::adam;
    throw ConfigurationError("optimizer must be 'sgd' or 'adam', not '" + s + "'");
}

TrainingConfig parse_training(const json &j, int action_step) {
    check_keys(j, "training",
               {"optimizer", "learning_rate", "max_train_steps", "initial_collect_steps", "buffer_len",
                "batch_size", "discount", "epsilon", "target_sync_steps", "hidden_units", "actions",
                "overprovision_weight", "reward_offset", "early_stop_loss", "validation_interval",
                "validation_steps", "utilization_weight", "episode_steps", "vary_loads",
                "min_load_scale", "max_load_scale", "initial_ratio_jitter"});
    TrainingConfig t;
    auto &h = t.options.hyper;
    if (j.contains("optimizer")) h.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    read(j, "learning_rate", h.learning_rate);
    read(j, "max_train_steps", h.max_train_steps);
    read(j, "initial_collect_steps", h.initial_collect_steps);
    read(j, "buffer_len", h.buffer_len);
    read(j, "batch_size", h.batch_size);
    read(j, "discount", h.discount);
    read(j, "epsilon", h.epsilon);
    read(j, "target_sync_steps", h.target_sync_steps);
    read(j, "hidden_units", h.hidden_units);
    const std::string actions = j.value("actions", std::string("three"));
    if (actions == "three")
        t.options.actions = policy::ActionSet::three(action_step);
    else if (actions == "nine")
        t.options.actions = policy::ActionSet::nine(action_step);
    else
        throw ConfigurationError("actions must be 'three' or 'nine'");
    read(j, "overprovision_weight", t.options.overprovision_weight);
    read(j, "reward_offset", t.options.reward_offset);
    read(j, "early_stop_loss", t.options.early_stop_loss);
    read(j, "validation_interval", t.options.validation.interval);
    read(j, "validation_steps", t.options.validation.steps);
    read(j, "utilization_weight", t.options.validation.utilization_weight);
    read(j, "episode_steps", t.episode_steps);
    read(j, "vary_loads", t.vary_loads);
    read(j, "min_load_scale", t.min_load_scale);
    read(j, "max_load_scale", t.max_load_scale);
    read(j, "initial_ratio_jitter", t.initial_ratio_jitter);
    if (auto v = h.violations(); !v.empty()) throw ConfigurationError("training: " + v.front());
    return t;
}

std::string default_notify_url(const rapp::RappConfig &r) {
    return "http://" + r.callback_host + ":" + std::to_string(r.callback_port) + r.callback_path;
}

} // namespace

std::vector<odu::TrafficProfile> BenchConfig::tenant_profiles() const {
    std::vector<odu::TrafficProfile> out;
    for (const auto &t : scenario.tenants) {
        auto it = profiles.find(t.traffic_profile);
        out.push_back(it != profiles.end() ? it->second : odu::builtin_profile(t.traffic_profile));
    }
    return out;
}

policy::EnvironmentOptions BenchConfig::environment() const {
    policy::EnvironmentOptions e;
    e.scenario = scenario;
    e.profiles = tenant_profiles();
    e.episode_steps = training.episode_steps;
    e.vary_loads = training.vary_loads;
    e.min_scale = training.min_load_scale;
    e.max_scale = training.max_load_scale;
    e.initial_ratio_jitter = training.initial_ratio_jitter;
    return e;
}

BenchConfig parse_config(std::string_view text) {
    BenchConfig c;
    try {
        const auto j = json::parse(text);
        check_keys(j, "config", {"scenario", "profiles", "odu", "rapp", "training", "monitor"});
        if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario"));
        if (auto v = nrm::validate_scenario(c.scenario); !v.empty())
            throw ConfigurationError("scenario: " + v.front());

        if (j.contains("profiles"))
            for (const auto &[name, p] : j.at("profiles").items()) c.profiles[name] = parse_profile(p, name);
        try {
            (void)c.tenant_profiles();
        } catch (const std::exception &e) {
            throw ConfigurationError(std::string("traffic profile: ") + e.what());
        }

        c.rapp.scenario = c.scenario;
        c.rapp.cells = {rapp::CellEndpoint{}};
        c.rapp.cells[0].cell_id = c.scenario.cell.cell_id;
        c.rapp.watchdog = std::chrono::milliseconds(2 * 1000L * c.scenario.delta_t_s);
        if (j.contains("rapp")) {
            const auto &r = j.at("rapp");
            check_keys(r, "rapp", {"callback_host", "callback_port", "callback_path", "keep_alive",
                                   "netconf_timeout_ms", "fetch_timeout_ms", "watchdog_ms", "cells"});
            read(r, "callback_host", c.rapp.callback_host);
            read(r, "callback_port", c.rapp.callback_port);
            read(r, "callback_path", c.rapp.callback_path);
            read(r, "keep_alive", c.rapp.keep_alive);
            read_ms(r, "netconf_timeout_ms", c.rapp.netconf_timeout);
            read_ms(r, "fetch_timeout_ms", c.rapp.fetch_timeout);
            read_ms(r, "watchdog_ms", c.rapp.watchdog);
            if (r.contains("cells")) {
                c.rapp.cells.clear();
                for (const auto &e : r.at("cells")) {
                    check_keys(e, "rapp.cells[]", {"cell_id", "netconf_host", "netconf_port", "pm_base_url"});
                    rapp::CellEndpoint ce;
                    ce.cell_id = c.scenario.cell.cell_id;
                    read(e, "cell_id", ce.cell_id);
                    read(e, "netconf_host", ce.netconf_host);
                    read(e, "netconf_port", ce.netconf_port);
                    read(e, "pm_base_url", ce.pm_base_url);
                    c.rapp.cells.push_back(ce);
                }
            }
        }

        c.odu.notify_url = default_notify_url(c.rapp);
        if (j.contains("odu")) {
            const auto &o = j.at("odu");
            check_keys(o, "odu", {"host", "netconf_port", "pm_port", "notify_url", "acceleration",
                                  "lockstep_timeout_ms", "wait_for_consumer_ms", "notify_timeout_ms",
                                  "pm_dir", "series_csv", "epoch"});
            read(o, "host", c.odu.host);
            read(o, "netconf_port", c.odu.netconf_port);
            read(o, "pm_port", c.odu.pm_port);
            read(o, "notify_url", c.odu.notify_url);
            read(o, "acceleration", c.odu.acceleration);
            read_ms(o, "lockstep_timeout_ms", c.odu.lockstep_timeout);
            read_ms(o, "wait_for_consumer_ms", c.odu.wait_for_consumer);
            read_ms(o, "notify_timeout_ms", c.odu.notify_timeout);
            if (o.contains("pm_dir")) c.odu.pm_dir = o.at("pm_dir").get<std::string>();
            if (o.contains("series_csv")) c.odu.series_csv = o.at("series_csv").get<std::string>();
            read(o, "epoch", c.odu.epoch);
            if (c.odu.acceleration < 0.0) throw ConfigurationError("odu.acceleration must be >= 0");
            (void)pm::parse_iso8601(c.odu.epoch);
        }
        if (!j.contains("rapp") || !j.at("rapp").contains("cells"))
            c.rapp.cells[0].pm_base_url = "http://" + c.odu.host + ":" + std::to_string(c.odu.pm_port);

        c.training = parse_training(j.value("training", json::object()), c.scenario.action_step_pct);
        if (j.contains("monitor")) {
            check_keys(j.at("monitor"), "monitor", {"warmup_steps"});
            read(j.at("monitor"), "warmup_steps", c.monitor.warmup_steps);
        }
        if (auto v = c.rapp.violations(); !v.empty()) throw ConfigurationError("rapp: " + v.front());
    } catch (const json::exception &e) {
        throw ConfigurationError(std::string("config: ") + e.what());
    } catch (const pm::PmFormatError &e) {
        throw ConfigurationError(std::string("config: ") + e.what());
    }
    return c;
}

BenchConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_json(const BenchConfig &c) {
    json tenants = json::array();
    for (const auto &t : c.scenario.tenants)
        tenants.push_back({{"snssai", t.snssai.id},
                           {"sagbr_mbps", t.sla.sagbr_mbps},
                           {"mcbr_mbps", t.sla.mcbr_mbps},
                           {"initial_ratio", t.initial_ratio},
                           {"traffic_profile", t.traffic_profile}});
    json cells = json::array();
    for (const auto &e : c.rapp.cells)
        cells.push_back({{"cell_id", e.cell_id},
                         {"netconf_host", e.netconf_host},
                         {"netconf_port", e.netconf_port},
                         {"pm_base_url", e.pm_base_url}});
    json profiles = json::object();
    for (const auto &[name, p] : c.profiles)
        profiles[name] = {{"days", p.hourly}, {"noise_std", p.noise_std}};
    const auto &h = c.training.options.hyper;
    const auto &o = c.training.options;
    json j{
        {"scenario",
         {{"cell",
           {{"cell_id", c.scenario.cell.cell_id},
            {"capacity_mbps", c.scenario.cell.capacity_mbps},
            {"total_prb", c.scenario.cell.total_prb}}},
          {"delta_t_s", c.scenario.delta_t_s},
          {"action_step_pct", c.scenario.action_step_pct},
          {"tenants", tenants}}},
        {"profiles", profiles},
        {"odu",
         {{"host", c.odu.host},
          {"netconf_port", c.odu.netconf_port},
          {"pm_port", c.odu.pm_port},
          {"notify_url", c.odu.notify_url},
          {"acceleration", c.odu.acceleration},
          {"lockstep_timeout_ms", c.odu.lockstep_timeout.count()},
          {"wait_for_consumer_ms", c.odu.wait_for_consumer.count()},
          {"notify_timeout_ms", c.odu.notify_timeout.count()},
          {"pm_dir", c.odu.pm_dir.string()},
          {"series_csv", c.odu.series_csv.string()},
          {"epoch", c.odu.epoch}}},
        {"rapp",
         {{"callback_host", c.rapp.callback_host},
          {"callback_port", c.rapp.callback_port},
          {"callback_path", c.rapp.callback_path},
          {"keep_alive", c.rapp.keep_alive},
          {"netconf_timeout_ms", c.rapp.netconf_timeout.count()},
          {"fetch_timeout_ms", c.rapp.fetch_timeout.count()},
          {"watchdog_ms", c.rapp.watchdog.count()},
          {"cells", cells}}},
        {"training",
         {{"optimizer", h.optimizer == policy::OptimizerKind::adam ? "adam" : "sgd"},
          {"learning_rate", h.learning_rate},
          {"max_train_steps", h.max_train_steps},
          {"initial_collect_steps", h.initial_collect_steps},
          {"buffer_len", h.buffer_len},
          {"batch_size", h.batch_size},
          {"discount", h.discount},
          {"epsilon", h.epsilon},
          {"target_sync_steps", h.target_sync_steps},
          {"hidden_units", h.hidden_units},
          {"actions", o.actions.size() == 9 ? "nine" : "three"},
          {"overprovision_weight", o.overprovision_weight},
          {"reward_offset", o.reward_offset},
          {"early_stop_loss", o.early_stop_loss},
          {"validation_interval", o.validation.interval},
          {"validation_steps", o.validation.steps},
          {"utilization_weight", o.validation.utilization_weight},
          {"episode_steps", c.training.episode_steps},
          {"vary_loads", c.training.vary_loads},
          {"min_load_scale", c.training.min_load_scale},
          {"max_load_scale", c.training.max_load_scale},
          {"initial_ratio_jitter", c.training.initial_ratio_jitter}}},
        {"monitor", {{"warmup_steps", c.monitor.warmup_steps}}},
    };
    return j.dump(2) + "\n";
}

} // namespace capshare::config
