// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "certledger/audit.hpp"
#include "certledger/registry.hpp"
#include "certledger/store.hpp"
#include "certledger/vulndisc.hpp"
#include "test_support.hpp"

using namespace certledger;
using namespace certledger::vulndisc;
using certledger::test::Harness;
using certledger::test::test_keys;

namespace {

std::vector<std::uint8_t> as_bytes(std::string_view s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

// Manufacturer with a registry, a finder, and a short embargo.
struct Setup {
    KeyPair manufacturer = test_keys(1);
    KeyPair finder = test_keys(2);
    Harness h;
    Address mfg_auth;
    Address reg;
    Digest id{};
    std::string location;
    Digest ciphertext_hash{};

    explicit Setup(std::uint64_t embargo = 5)
        : h({manufacturer, finder}, 1000, 8, embargo) {
        mfg_auth = h.deploy_authority(manufacturer, "ManufacturerA");
        reg = h.deploy_registry(manufacturer, "ManufacturerA", mfg_auth,
                                "temp-sensor-model1");
    }

    test::Harness::TxResult disclose(std::string_view details) {
        auto package = prepare_disclosure(manufacturer.public_key,
                                          as_bytes(details));
        REQUIRE(package.has_value());
        ciphertext_hash = package->ciphertext_hash;
        location = "store://" + to_hex(ciphertext_hash).substr(2);
        auto r = h.call(finder, reg,
                        chain::ContractCall{registry::RegistryCall{
                            registry::Disclose{location, ciphertext_hash}}});
        id = disclosure_id(reg, finder.address(), location, ciphertext_hash);
        return r;
    }

    Disclosure record() {
        auto state = h.state();
        const auto* r = state.registry_at(reg);
        auto it = r->disclosures.find(id);
        REQUIRE(it != r->disclosures.end());
        return it->second;
    }

    test::Harness::TxResult update(const KeyPair& who, Status target) {
        return h.call(who, reg,
                      chain::ContractCall{registry::RegistryCall{
                          registry::UpdateDisclosure{id, target}}});
    }

    test::Harness::TxResult publish(const KeyPair& who) {
        return h.call(who, reg,
                      chain::ContractCall{registry::RegistryCall{
                          registry::PublishDisclosure{id}}});
    }
};

}  // namespace

TEST_CASE("disclosure encryption round trip") {
    auto manufacturer = test_keys(1);
    auto details = as_bytes("heap overflow in the MQTT parser, CVSS high");

    auto package = prepare_disclosure(manufacturer.public_key, details);
    REQUIRE(package.has_value());
    CHECK(package->ciphertext_hash ==
          sha256(std::span<const std::uint8_t>(package->ciphertext)));

    SUBCASE("the manufacturer decrypts the original bytes") {
        auto opened = open_disclosure(manufacturer, package->ciphertext);
        REQUIRE(opened.has_value());
        CHECK(*opened == details);
    }
    SUBCASE("a non-manufacturer key cannot decrypt") {
        CHECK_FALSE(
            open_disclosure(test_keys(2), package->ciphertext).has_value());
    }
    SUBCASE("the ciphertext never contains the plaintext") {
        auto needle = std::string("MQTT");
        std::string haystack(package->ciphertext.begin(),
                             package->ciphertext.end());
        CHECK(haystack.find(needle) == std::string::npos);
    }
}

TEST_CASE("disclosure lifecycle on the registry") {
    Setup s;
    REQUIRE(s.disclose("details-1").ok);

    SUBCASE("recorded as Disclosed with the commitment only") {
        const auto& d = s.record();
        CHECK(d.status == Status::Disclosed);
        CHECK(d.discoverer == s.finder.address());
        CHECK(d.ciphertext_location == s.location);
        CHECK(d.ciphertext_hash == s.ciphertext_hash);
        CHECK(d.disclosed_at > 0);
        REQUIRE(d.status_log.size() == 1);
        CHECK(d.status_log[0].status == Status::Disclosed);
    }
    SUBCASE("manufacturer acknowledges, then remediates") {
        CHECK(s.update(s.manufacturer, Status::Acknowledged).ok);
        CHECK(s.record().status == Status::Acknowledged);
        CHECK(s.update(s.manufacturer, Status::Remediated).ok);
        CHECK(s.record().status == Status::Remediated);
    }
    SUBCASE("the discoverer cannot acknowledge") {
        auto r = s.update(s.finder, Status::Acknowledged);
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::NotManufacturer);
    }
    SUBCASE("skipping straight to Remediated is illegal") {
        auto r = s.update(s.manufacturer, Status::Remediated);
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::IllegalTransition);
    }
    SUBCASE("unknown ids are rejected") {
        auto r = s.h.call(s.manufacturer, s.reg,
                          chain::ContractCall{registry::RegistryCall{
                              registry::UpdateDisclosure{
                                  sha256("nope"), Status::Acknowledged}}});
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::UnknownDisclosure);
    }
    SUBCASE("a duplicate identical disclosure is refused") {
        auto r = s.h.call(s.finder, s.reg,
                          chain::ContractCall{registry::RegistryCall{
                              registry::Disclose{s.location,
                                                 s.ciphertext_hash}}});
        CHECK_FALSE(r.ok);
    }
    SUBCASE("disclosing against a non-registry contract fails") {
        auto r = s.h.call(s.finder, s.mfg_auth,
                          chain::ContractCall{registry::RegistryCall{
                              registry::Disclose{s.location,
                                                 s.ciphertext_hash}}});
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::UnknownRegistry);
    }
}

TEST_CASE("an unusable recipient key is an encryption failure") {
    PublicKey broken;  // all-zero bytes: not a point on the curve
    auto details = as_bytes("x");
    CHECK_FALSE(prepare_disclosure(broken, details).has_value());
}

TEST_CASE("publication rules") {
    SUBCASE("remediated publishes at any time") {
        Setup s(/*embargo=*/1000);
        REQUIRE(s.disclose("d").ok);
        REQUIRE(s.update(s.manufacturer, Status::Acknowledged).ok);
        REQUIRE(s.update(s.manufacturer, Status::Remediated).ok);
        CHECK(s.publish(s.finder).ok);
        CHECK(s.record().status == Status::Published);
    }
    SUBCASE("an active embargo blocks publication") {
        Setup s(/*embargo=*/1000);
        REQUIRE(s.disclose("d").ok);
        auto r = s.publish(s.finder);
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::EmbargoActive);
    }
    SUBCASE("the embargo boundary is inclusive") {
        Setup s(/*embargo=*/4);
        REQUIRE(s.disclose("d").ok);
        const std::uint64_t disclosed_at = s.record().disclosed_at;

        // Park one block below the boundary: a publish would land at
        // disclosed-at + 3 and must still be embargoed.
        while (s.h.validator->height() + 1 < disclosed_at + 3) {
            s.h.validator->mine_and_announce();
        }
        auto early = s.publish(s.finder);
        CHECK_FALSE(early.ok);
        CHECK(early.error->code == TxErrorCode::EmbargoActive);

        // One more block: the publish lands exactly at disclosed-at + 4.
        s.h.validator->mine_and_announce();
        CHECK(s.publish(s.finder).ok);
        const auto d = s.record();
        CHECK(d.status == Status::Published);
        CHECK(d.status_log.back().block_height == disclosed_at + 4);
    }
    SUBCASE("outsiders may not publish") {
        Setup s(/*embargo=*/1);
        REQUIRE(s.disclose("d").ok);
        auto outsider = test_keys(9);
        s.h.apply(s.manufacturer, chain::Transfer{outsider.address(), 100});
        auto r = s.h.call(outsider, s.reg,
                          chain::ContractCall{registry::RegistryCall{
                              registry::PublishDisclosure{s.id}}});
        CHECK_FALSE(r.ok);
        CHECK(r.error->code == TxErrorCode::NotParty);
    }
    SUBCASE("publication lands in the registry file log") {
        Setup s(/*embargo=*/1000);
        REQUIRE(s.disclose("d").ok);
        REQUIRE(s.update(s.manufacturer, Status::Acknowledged).ok);
        REQUIRE(s.update(s.manufacturer, Status::Remediated).ok);
        REQUIRE(s.publish(s.manufacturer).ok);
        auto state = s.h.state();
        const auto* event = registry::latest_file(*state.registry_at(s.reg),
                                                  "VULNERABILITY");
        REQUIRE(event != nullptr);
        CHECK(event->file_location == s.location);
        CHECK(event->file_hash == s.ciphertext_hash);
    }
    SUBCASE("published is terminal") {
        Setup s(/*embargo=*/1000);
        REQUIRE(s.disclose("d").ok);
        REQUIRE(s.update(s.manufacturer, Status::Acknowledged).ok);
        REQUIRE(s.update(s.manufacturer, Status::Remediated).ok);
        REQUIRE(s.publish(s.manufacturer).ok);
        CHECK_FALSE(s.publish(s.manufacturer).ok);
        CHECK_FALSE(s.update(s.manufacturer, Status::Acknowledged).ok);
        CHECK_FALSE(s.update(s.manufacturer, Status::Remediated).ok);
    }
}

TEST_CASE("status log is always a legal path") {
    // Brute-force generated histories: random legal/illegal attempts; the
    // recorded log must only ever walk declared edges.
    Setup s(/*embargo=*/3);
    REQUIRE(s.disclose("d").ok);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        switch (rng() % 4) {
            case 0: s.update(s.manufacturer, Status::Acknowledged); break;
            case 1: s.update(s.manufacturer, Status::Remediated); break;
            case 2: s.publish(s.finder); break;
            case 3: s.h.validator->mine_and_announce(); break;
        }
    }
    const auto& log = s.record().status_log;
    for (std::size_t i = 1; i < log.size(); ++i) {
        const Status from = log[i - 1].status;
        const Status to = log[i].status;
        const bool legal_edge =
            legal_update(from, to) ||
            (to == Status::Published &&
             (from == Status::Remediated || from == Status::Disclosed ||
              from == Status::Acknowledged));
        CHECK(legal_edge);
        CHECK(log[i - 1].block_height <= log[i].block_height);
    }
    // Embargo enforcement: early publication implies remediation first.
    const auto& d = s.record();
    if (d.status == Status::Published) {
        const auto published_at = d.status_log.back().block_height;
        bool was_remediated = false;
        for (const auto& t : d.status_log) {
            if (t.status == Status::Remediated) was_remediated = true;
        }
        if (published_at < d.disclosed_at + 3) {
            CHECK(was_remediated);
        }
    }
}

TEST_CASE("confidentiality: plaintext appears nowhere on chain or in store") {
    Setup s(/*embargo=*/1000);
    const std::string secret = "EXPLOIT-DETAILS-7f3a";
    REQUIRE(s.disclose(secret).ok);

    for (const auto& block : s.h.validator->canonical_chain()) {
        const std::string line = chain::block_to_json(block);
        CHECK(line.find(secret) == std::string::npos);
    }
}
