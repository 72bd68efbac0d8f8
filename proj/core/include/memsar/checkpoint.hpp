#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "memsar/system.hpp"

namespace memsar {

inline constexpr const char* kCheckpointFormat = "memsar-checkpoint/1";

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Checkpoint {
    SystemParams params;
    std::uint64_t seed = 0;
    // Serialized experiment config the parameters came from; may be empty.
    std::string config_json;
    std::string version;
};

// Library version baked in at build time.
std::string library_version();

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace memsar
