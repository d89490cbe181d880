#pragma once

#include <memory>
#include <string>
#include <vector>

#include "exchange.hpp"

namespace dra {

// One exchange payload: named files in manifest order.
struct Envelope {
    int iteration = 0;
    std::vector<NamedFile> files;

    bool has(const std::string& name) const;
    const std::string& bytes(const std::string& name) const;
};

// Coordinator's side of the exchange contract.
class CoordinatorLink {
  public:
    virtual ~CoordinatorLink() = default;
    virtual void broadcast(const Envelope& env) = 0;
    // Blocks for partner dp_cd's payload; throws WorkerFailed on
    // job_fail.ok, TimeoutError past the deadline.
    virtual Envelope await_worker(int dp_cd) = 0;
    virtual void terminal(bool success) = 0;
};

// One worker's side.
class WorkerLink {
  public:
    virtual ~WorkerLink() = default;
    virtual Envelope await_broadcast() = 0;
    virtual void publish(const Envelope& env) = 0;
    virtual void terminal(bool success) = 0;
};

// Every payload that crossed the transport, for the privacy audit.
struct TranscriptEntry {
    std::string direction;  // "to_workers" or "to_coordinator"
    int party = 0;          // dp_cd (0 = coordinator origin)
    int iteration = 0;
    std::vector<NamedFile> files;
};

}  // namespace dra
