// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certledger/crypto.hpp"

namespace certledger::vulndisc {

// Coordinated disclosure lifecycle. Only the ciphertext commitment
// (location + hash) ever reaches the chain; plaintext stays with the
// discoverer and, after decryption, the manufacturer.
//
// Legal transitions:
//   Disclosed -> Acknowledged -> Remediated -> Published
// and Disclosed/Acknowledged -> Published once the embargo has elapsed
// (publication height >= disclosed-at + embargo-blocks, boundary inclusive).

enum class Status { Disclosed, Acknowledged, Remediated, Published };

std::string_view to_string(Status s);
std::optional<Status> status_from_string(std::string_view name);

struct StatusTransition {
    Status status = Status::Disclosed;
    std::uint64_t block_height = 0;

    bool operator==(const StatusTransition&) const = default;
};

struct Disclosure {
    Digest id{};
    Address discoverer;
    std::string ciphertext_location;
    Digest ciphertext_hash{};
    std::uint64_t disclosed_at = 0;
    Status status = Status::Disclosed;
    std::vector<StatusTransition> status_log;

    bool operator==(const Disclosure&) const = default;
};

// True for the two manufacturer-driven edges (Disclosed->Acknowledged,
// Acknowledged->Remediated). Publication has its own embargo rule and is
// checked by may_publish.
bool legal_update(Status from, Status to);

bool may_publish(Status current, std::uint64_t disclosed_at,
                 std::uint64_t embargo_blocks, std::uint64_t now_height);

Digest disclosure_id(const Address& registry, const Address& discoverer,
                     std::string_view ciphertext_location,
                     const Digest& ciphertext_hash);

struct DisclosurePackage {
    std::vector<std::uint8_t> ciphertext;
    Digest ciphertext_hash{};
};

// Encrypts vulnerability details so only the manufacturer key holder can
// read them. nullopt when the recipient key is unusable.
std::optional<DisclosurePackage> prepare_disclosure(
    const PublicKey& manufacturer, std::span<const std::uint8_t> details);

std::optional<std::vector<std::uint8_t>> open_disclosure(
    const KeyPair& manufacturer, std::span<const std::uint8_t> ciphertext);

}  // namespace certledger::vulndisc
