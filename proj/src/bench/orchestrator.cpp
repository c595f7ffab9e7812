#include "capshare/bench/orchestrator.hpp"

#include <csignal>
#include <cstring>
#include <fstream>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <netinet/in.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

extern char **environ;

namespace capshare::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::uint16_t free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    a.sin_port = 0;
    socklen_t len = sizeof a;
    if (fd < 0 || ::bind(fd, reinterpret_cast<sockaddr *>(&a), sizeof a) != 0 ||
        ::getsockname(fd, reinterpret_cast<sockaddr *>(&a), &len) != 0) {
        if (fd >= 0) ::close(fd);
        throw std::runtime_error("cannot find a free port");
    }
    ::close(fd);
    return ntohs(a.sin_port);
}

class Child {
public:
    Child(const std::vector<std::string> &argv, const std::filesystem::path &log) {
        std::vector<char *> args;
        for (const auto &a : argv) args.push_back(const_cast<char *>(a.c_str()));
        args.push_back(nullptr);
        posix_spawn_file_actions_t fa;
        posix_spawn_file_actions_init(&fa);
        posix_spawn_file_actions_addopen(&fa, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        posix_spawn_file_actions_adddup2(&fa, STDOUT_FILENO, STDERR_FILENO);
        const int rc = ::posix_spawn(&pid_, argv[0].c_str(), &fa, nullptr, args.data(), environ);
        posix_spawn_file_actions_destroy(&fa);
        if (rc != 0) throw std::runtime_error("cannot start " + argv[0] + ": " + std::strerror(rc));
        name_ = std::filesystem::path(argv[0]).filename().string();
    }
    ~Child() {
        if (running()) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, nullptr, 0);
        }
    }

    bool running() {
        if (done_) return false;
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
            done_ = true;
            status_ = status;
        }
        return !done_;
    }
    bool succeeded() const { return done_ && WIFEXITED(status_) && WEXITSTATUS(status_) == 0; }
    std::string describe() const {
        if (!done_) return name_ + " still running";
        if (WIFEXITED(status_)) return name_ + " exited with status " + std::to_string(WEXITSTATUS(status_));
        return name_ + " killed by signal " + std::to_string(WTERMSIG(status_));
    }
    // SIGTERM, then SIGKILL after `grace`.
    void terminate(std::chrono::milliseconds grace) {
        if (!running()) return;
        ::kill(pid_, SIGTERM);
        const auto deadline = Clock::now() + grace;
        while (running() && Clock::now() < deadline) std::this_thread::sleep_for(std::chrono::milliseconds(10));
        if (running()) {
            ::kill(pid_, SIGKILL);
            int status = 0;
            ::waitpid(pid_, &status, 0);
            done_ = true;
            status_ = status;
        }
    }

private:
    pid_t pid_ = -1;
    bool done_ = false;
    int status_ = 0;
    std::string name_;
};

} // namespace

std::filesystem::path executable_dir() {
    return std::filesystem::read_symlink("/proc/self/exe").parent_path();
}

sla::RunReport orchestrate_run(const RunOptions &options) {
    auto cfg = options.config;
    const auto &scenario = cfg.scenario;
    if (options.steps <= 0) {
        // Nothing to run; the metrics reject the empty series.
        return sla::compute_report(sla::series_from_records(scenario, {}));
    }
    std::filesystem::create_directories(options.out_dir);
    const auto out = std::filesystem::absolute(options.out_dir);

    if (options.free_ports) {
        cfg.odu.netconf_port = free_port();
        cfg.odu.pm_port = free_port();
        cfg.rapp.callback_port = free_port();
        cfg.odu.notify_url = "http://" + cfg.rapp.callback_host + ":" +
                             std::to_string(cfg.rapp.callback_port) + cfg.rapp.callback_path;
        if (cfg.rapp.cells.size() != 1)
            throw nrm::ConfigurationError("free port selection supports a single cell");
        cfg.rapp.cells[0].netconf_port = cfg.odu.netconf_port;
        cfg.rapp.cells[0].pm_base_url = "http://" + cfg.odu.host + ":" + std::to_string(cfg.odu.pm_port);
    }
    cfg.odu.series_csv = out / "truth.csv";
    if (cfg.odu.wait_for_consumer.count() == 0) cfg.odu.wait_for_consumer = std::chrono::seconds(30);
    std::filesystem::remove(cfg.odu.series_csv);

    const auto run_config = out / "run_config.json";
    {
        std::ofstream f(run_config, std::ios::trunc);
        f << config::to_json(cfg);
        if (!f.flush()) throw std::runtime_error("cannot write " + run_config.string());
    }

    const auto tools = options.tools_dir.empty() ? executable_dir() : options.tools_dir;
    char accel[64];
    std::snprintf(accel, sizeof accel, "%.17g", cfg.odu.acceleration);
    Child odu({(tools / "odu-sim").string(), "serve", "--config", run_config.string(), "--seed",
               std::to_string(options.seed), "--accel", accel, "--steps", std::to_string(options.steps)},
              out / "odu-sim.log");
    // Give the O-DU a moment to bind; the rApp retries its first connection anyway.
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    Child rapp({(tools / "rapp").string(), "run", "--config", run_config.string(), "--policies",
                std::filesystem::absolute(options.policy_dir).string(), "--log",
                (out / "rapp_loop.jsonl").string()},
               out / "rapp.log");

    bool partial = false;
    std::string note;
    const auto deadline = Clock::now() + options.timeout;
    for (;;) {
        if (!odu.running()) {
            if (!odu.succeeded()) {
                partial = true;
                note = odu.describe();
            }
            break;
        }
        if (!rapp.running()) {
            partial = true;
            note = rapp.describe() + " before the run finished";
            odu.terminate(std::chrono::seconds(5));
            break;
        }
        if (Clock::now() > deadline) {
            partial = true;
            note = "run timed out";
            odu.terminate(std::chrono::seconds(5));
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    rapp.terminate(std::chrono::seconds(5));
    if (partial) spdlog::warn("partial run: {}", note);

    std::vector<odu::StepRecord> records;
    if (std::ifstream in(cfg.odu.series_csv); in) records = odu::read_series(in);
    if (!partial && long(records.size()) != options.steps) {
        partial = true;
        note = "recorded " + std::to_string(records.size()) + " of " + std::to_string(options.steps) + " steps";
    }
    const long warmup = std::min<long>(cfg.monitor.warmup_steps, long(records.size()));
    const std::span<const odu::StepRecord> kept(records.data() + warmup, records.size() - std::size_t(warmup));
    const auto series = sla::series_from_records(scenario, kept);
    return sla::emit_report(series, out, scenario.cell.capacity_mbps, scenario.delta_t_s, partial, note);
}

} // namespace capshare::bench
