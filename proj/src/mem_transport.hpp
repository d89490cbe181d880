#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>

#include "transport.hpp"

namespace dra {

// In-memory exchange hub with the same semantics as the file protocol:
// a payload becomes visible atomically (the queue push is the trigger),
// terminal failure dominates, waits honor the deadline.
class MemExchange {
  public:
    explicit MemExchange(std::vector<int> partners, double deadline_sec = 600.0);

    std::unique_ptr<CoordinatorLink> coordinator_link();
    std::unique_ptr<WorkerLink> worker_link(int dp_cd);

    std::vector<TranscriptEntry> transcript() const;

    // Wakes every waiter; subsequent empty waits fail immediately.
    void shutdown();

    Envelope pop(int dp_cd, bool from_coordinator);
    void push(int dp_cd, bool to_coordinator, const Envelope& env);
    void set_terminal(int dp_cd, bool success);

    const std::vector<int>& partners() const { return partners_; }

  private:
    struct Party {
        std::deque<Envelope> inbox;
        TerminalState state = TerminalState::none;
    };

    std::vector<int> partners_;
    double deadline_sec_;
    bool shutdown_ = false;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::map<int, Party> to_worker_;       // coordinator -> dp
    std::map<int, Party> to_coordinator_;  // dp -> coordinator
    std::vector<TranscriptEntry> transcript_;
};

}  // namespace dra
