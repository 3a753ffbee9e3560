#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "platescreen/pipeline.hpp"

namespace platescreen::service {

namespace fs = std::filesystem;

struct ServiceOptions {
    fs::path project_path;
    fs::path static_dir;  // optional UI bundle served at /
    pipeline::TrainOptions train;
};

// HTTP API over one project file. Reads use an immutable snapshot; POST
// routes take the writer lock, save atomically and publish a new snapshot.
class Service {
public:
    explicit Service(ServiceOptions opt);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds and serves on a background thread; port 0 picks a free port.
    // Returns the bound port. Throws IoError when binding fails.
    int start(const std::string& host, int port);
    // Blocks in the calling thread.
    void run(const std::string& host, int port);
    void stop();

    std::shared_ptr<const Project> snapshot() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// --port wins over PLATESCREEN_PORT, which wins over the fallback.
int resolve_port(std::optional<int> cli_port, int fallback = 8080);

}  // namespace platescreen::service
