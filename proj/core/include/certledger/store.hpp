// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certledger/crypto.hpp"

namespace certledger::store {

// Off-chain content-addressed object store. Objects live under
// <root>/objects/<hh>/<rest-of-hash>, where the path is the lowercase hex
// SHA-256 of the content; locators are "store://<hex-hash>". Writes go
// through a temp file + rename so readers only ever observe complete
// objects.
class ContentStore {
  public:
    explicit ContentStore(std::filesystem::path root);

    struct PutResult {
        std::string location;
        Digest hash{};
    };

    // Content must be non-empty; identical content dedups onto the same
    // location. Throws std::invalid_argument on empty content.
    PutResult put(std::span<const std::uint8_t> content);

    std::optional<std::vector<std::uint8_t>> get(std::string_view location) const;

    static bool verify(std::span<const std::uint8_t> content,
                       const Digest& expected);

    static std::string location_for(const Digest& hash);
    static std::optional<Digest> hash_of_location(std::string_view location);

    const std::filesystem::path& root() const { return root_; }

  private:
    std::filesystem::path object_path(const Digest& hash) const;

    std::filesystem::path root_;
};

}  // namespace certledger::store
