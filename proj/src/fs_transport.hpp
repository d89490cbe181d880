#pragma once

#include <filesystem>

#include "model_spec.hpp"
#include "transport.hpp"

namespace dra {

// Shared-filesystem transport. Each party owns a Sentinel-style tree under
// <root>/<request_id>/ and also performs the outbound transfer-software
// role: after staging payload + manifest + trigger in its own outbound
// directory it copies the listed files into the peer's inbound directory
// (trigger written last there too), then removes its own staged trigger.
//
//   <root>/<request>/central/{dplocal,inputfiles,msoc,msoc<dp>...}
//   <root>/<request>/dp<k>/{dplocal,inputfiles,msoc}

std::filesystem::path coordinator_base(const std::filesystem::path& root,
                                       const std::string& request_id);
std::filesystem::path worker_base(const std::filesystem::path& root,
                                  const std::string& request_id, int dp_cd);

class FsCoordinatorLink final : public CoordinatorLink {
  public:
    FsCoordinatorLink(std::filesystem::path root, const ModelSpec& spec);

    void broadcast(const Envelope& env) override;
    Envelope await_worker(int dp_cd) override;
    void terminal(bool success) override;

    const RequestLayout& layout() const { return layout_; }

  private:
    RequestLayout layout_;
    std::filesystem::path root_;
    std::string request_id_;
    std::vector<int> partners_;
    WatchOptions watch_;
    int recv_iteration_ = 0;
};

class FsWorkerLink final : public WorkerLink {
  public:
    FsWorkerLink(std::filesystem::path root, const std::string& request_id, int dp_cd,
                 const WatchOptions& watch);

    Envelope await_broadcast() override;
    void publish(const Envelope& env) override;
    void terminal(bool success) override;

    const RequestLayout& layout() const { return layout_; }

  private:
    RequestLayout layout_;
    std::filesystem::path central_msoc_;
    int dp_cd_;
    WatchOptions watch_;
    int recv_iteration_ = 0;
};

}  // namespace dra
