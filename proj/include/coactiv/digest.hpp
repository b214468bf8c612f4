#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coactiv {

// Incremental SHA-256. All artifact digests (models, policies, chains,
// datasets) run through this so manifests are stable across runs.
class Sha256 {
public:
    Sha256();

    Sha256& update(const void* data, std::size_t len);
    Sha256& update(std::string_view s) { return update(s.data(), s.size()); }
    Sha256& update_u64(std::uint64_t v);  // little-endian
    Sha256& update_double(double v);      // IEEE-754 bit pattern

    // Finalizes and returns the lowercase hex digest. The object must not
    // be updated afterwards.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

}  // namespace coactiv
