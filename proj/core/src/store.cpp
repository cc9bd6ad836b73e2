// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/store.hpp"

#include <fstream>
#include <stdexcept>

namespace certledger::store {

namespace {

constexpr std::string_view kScheme = "store://";

std::string bare_hex(const Digest& hash) {
    std::string with_prefix = to_hex(hash);
    return with_prefix.substr(2);
}

}  // namespace

ContentStore::ContentStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "objects");
}

std::filesystem::path ContentStore::object_path(const Digest& hash) const {
    const std::string hex = bare_hex(hash);
    return root_ / "objects" / hex.substr(0, 2) / hex.substr(2);
}

ContentStore::PutResult ContentStore::put(std::span<const std::uint8_t> content) {
    if (content.empty()) {
        throw std::invalid_argument("cannot store empty content");
    }
    PutResult result;
    result.hash = sha256(content);
    result.location = location_for(result.hash);

    const std::filesystem::path target = object_path(result.hash);
    if (std::filesystem::exists(target)) {
        return result;  // content-addressed: same bytes, same object
    }
    std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path tmp =
        target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(reinterpret_cast<const char*>(content.data()),
                  static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, target);
    return result;
}

std::optional<std::vector<std::uint8_t>> ContentStore::get(
    std::string_view location) const {
    auto hash = hash_of_location(location);
    if (!hash) return std::nullopt;
    std::ifstream in(object_path(*hash), std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<std::uint8_t> content((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
    return content;
}

bool ContentStore::verify(std::span<const std::uint8_t> content,
                          const Digest& expected) {
    return sha256(content) == expected;
}

std::string ContentStore::location_for(const Digest& hash) {
    return std::string(kScheme) + bare_hex(hash);
}

std::optional<Digest> ContentStore::hash_of_location(std::string_view location) {
    if (!location.starts_with(kScheme)) return std::nullopt;
    return digest_from_hex(location.substr(kScheme.size()));
}

}  // namespace certledger::store
