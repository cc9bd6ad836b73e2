// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "certledger/store.hpp"
#include "test_support.hpp"

using namespace certledger;
using certledger::store::ContentStore;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("certledger-store-" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<std::uint8_t> as_bytes(std::string_view s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("the bundled MUD fixture has a stable content address") {
    ContentStore store(fresh_dir("fixture"));
    auto content = test::read_file(test::fixture_path("listing3.json"));
    auto put = store.put(content);

    // Reference digest computed with an independent SHA-256 implementation
    // over the frozen fixture bytes.
    CHECK(to_hex(put.hash) ==
          "0x1938e8e494facb047af3d1c75c2a3d26380908c5ce168fa2ff1ecb9e860c30e5");
    CHECK(put.location ==
          "store://"
          "1938e8e494facb047af3d1c75c2a3d26380908c5ce168fa2ff1ecb9e860c30e5");

    auto back = store.get(put.location);
    REQUIRE(back.has_value());
    CHECK(*back == content);
}

TEST_CASE("put/get round trip") {
    ContentStore store(fresh_dir("roundtrip"));

    SUBCASE("bytes come back identical") {
        auto content = as_bytes("device information record");
        auto put = store.put(content);
        CHECK(store.get(put.location) == content);
    }
    SUBCASE("identical content dedups onto one location") {
        auto content = as_bytes("same bytes");
        auto a = store.put(content);
        auto b = store.put(content);
        CHECK(a.hash == b.hash);
        CHECK(a.location == b.location);
    }
    SUBCASE("empty content is refused") {
        CHECK_THROWS_AS(store.put({}), std::invalid_argument);
    }
    SUBCASE("unknown locations are not found") {
        CHECK_FALSE(store.get("store://" + std::string(64, '0')).has_value());
        CHECK_FALSE(store.get("http://elsewhere").has_value());
        CHECK_FALSE(store.get("store://xyz").has_value());
    }
    SUBCASE("random blobs survive the round trip") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 30; ++i) {
            std::vector<std::uint8_t> blob(1 + rng() % 4096);
            for (auto& b : blob) b = static_cast<std::uint8_t>(rng());
            auto put = store.put(blob);
            CHECK(store.get(put.location) == blob);
        }
    }
}

TEST_CASE("objects survive a store restart") {
    auto dir = fresh_dir("restart");
    std::string location;
    {
        ContentStore store(dir);
        location = store.put(as_bytes("persistent")).location;
    }
    ContentStore reopened(dir);
    CHECK(reopened.get(location) == as_bytes("persistent"));
}

TEST_CASE("verification") {
    auto content = as_bytes("mud file bytes");
    auto hash = sha256(content);

    CHECK(ContentStore::verify(content, hash));

    SUBCASE("one flipped byte is detected") {
        auto tampered = content;
        tampered[5] ^= 0x01;
        CHECK_FALSE(ContentStore::verify(tampered, hash));
    }
    SUBCASE("empty content verifies against the hash of empty") {
        CHECK(ContentStore::verify({}, sha256("")));
    }
}

TEST_CASE("on-disk tampering is evident on verify") {
    auto dir = fresh_dir("tamper");
    ContentStore store(dir);
    auto content = as_bytes("authoritative firmware image");
    auto put = store.put(content);

    // Flip one byte of the stored object behind the store's back.
    auto hash = ContentStore::hash_of_location(put.location);
    REQUIRE(hash.has_value());
    std::filesystem::path object;
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) object = entry.path();
    }
    REQUIRE_FALSE(object.empty());
    {
        std::fstream f(object, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(3);
        char c;
        f.seekg(3);
        f.get(c);
        f.seekp(3);
        f.put(static_cast<char>(c ^ 0x01));
    }

    auto fetched = store.get(put.location);
    REQUIRE(fetched.has_value());
    CHECK_FALSE(ContentStore::verify(*fetched, put.hash));
}

TEST_CASE("locator scheme") {
    Digest d = sha256("x");
    auto location = ContentStore::location_for(d);
    CHECK(location.starts_with("store://"));
    CHECK(ContentStore::hash_of_location(location) == d);
    CHECK_FALSE(ContentStore::hash_of_location("store://short").has_value());
    CHECK_FALSE(ContentStore::hash_of_location("file://x").has_value());
}
