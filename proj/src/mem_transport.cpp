#include "mem_transport.hpp"

#include <algorithm>

#include "errors.hpp"

namespace dra {

bool Envelope::has(const std::string& name) const {
    return std::any_of(files.begin(), files.end(),
                       [&](const NamedFile& f) { return f.first == name; });
}

const std::string& Envelope::bytes(const std::string& name) const {
    for (auto& [n, b] : files)
        if (n == name) return b;
    throw ProtocolError("payload is missing file: " + name);
}

namespace {

class MemCoordinatorLink final : public CoordinatorLink {
  public:
    explicit MemCoordinatorLink(MemExchange& hub) : hub_(hub) {}
    void broadcast(const Envelope& env) override {
        for (int dp : hub_.partners()) hub_.push(dp, false, env);
    }
    Envelope await_worker(int dp_cd) override { return hub_.pop(dp_cd, false); }
    void terminal(bool success) override { hub_.set_terminal(0, success); }

  private:
    MemExchange& hub_;
};

class MemWorkerLink final : public WorkerLink {
  public:
    MemWorkerLink(MemExchange& hub, int dp_cd) : hub_(hub), dp_cd_(dp_cd) {}
    Envelope await_broadcast() override { return hub_.pop(dp_cd_, true); }
    void publish(const Envelope& env) override { hub_.push(dp_cd_, true, env); }
    void terminal(bool success) override { hub_.set_terminal(dp_cd_, success); }

  private:
    MemExchange& hub_;
    int dp_cd_;
};

}  // namespace

MemExchange::MemExchange(std::vector<int> partners, double deadline_sec)
    : partners_(std::move(partners)), deadline_sec_(deadline_sec) {
    for (int dp : partners_) {
        to_worker_[dp];
        to_coordinator_[dp];
    }
}

std::unique_ptr<CoordinatorLink> MemExchange::coordinator_link() {
    return std::make_unique<MemCoordinatorLink>(*this);
}

std::unique_ptr<WorkerLink> MemExchange::worker_link(int dp_cd) {
    if (!to_worker_.count(dp_cd))
        throw ConfigError("unknown partner: " + std::to_string(dp_cd));
    return std::make_unique<MemWorkerLink>(*this, dp_cd);
}

void MemExchange::push(int dp_cd, bool to_coordinator, const Envelope& env) {
    {
        std::lock_guard lock(mu_);
        Party& p = to_coordinator ? to_coordinator_[dp_cd] : to_worker_[dp_cd];
        p.inbox.push_back(env);
        transcript_.push_back({to_coordinator ? "to_coordinator" : "to_workers",
                               to_coordinator ? dp_cd : 0, env.iteration, env.files});
    }
    cv_.notify_all();
}

Envelope MemExchange::pop(int dp_cd, bool from_coordinator) {
    std::unique_lock lock(mu_);
    Party& p = from_coordinator ? to_worker_[dp_cd] : to_coordinator_[dp_cd];
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(deadline_sec_));
    for (;;) {
        if (!from_coordinator && p.state == TerminalState::failed)
            throw WorkerFailed(dp_cd, "partner " + std::to_string(dp_cd) +
                                          " signalled job_fail.ok");
        if (!p.inbox.empty()) {
            Envelope env = std::move(p.inbox.front());
            p.inbox.pop_front();
            return env;
        }
        if (shutdown_)
            throw TimeoutError("exchange shut down while waiting for party " +
                               std::to_string(dp_cd));
        if (cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
            p.inbox.empty())
            throw TimeoutError("no payload arrived for party " + std::to_string(dp_cd));
    }
}

void MemExchange::shutdown() {
    {
        std::lock_guard lock(mu_);
        shutdown_ = true;
    }
    cv_.notify_all();
}

void MemExchange::set_terminal(int dp_cd, bool success) {
    {
        std::lock_guard lock(mu_);
        if (dp_cd != 0) {
            TerminalState& st = to_coordinator_[dp_cd].state;
            if (st != TerminalState::failed)  // failure dominates
                st = success ? TerminalState::done : TerminalState::failed;
        }
    }
    cv_.notify_all();
}

std::vector<TranscriptEntry> MemExchange::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

}  // namespace dra
