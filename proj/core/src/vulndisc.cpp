// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/vulndisc.hpp"

#include "certledger/codec.hpp"

namespace certledger::vulndisc {

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Disclosed: return "disclosed";
        case Status::Acknowledged: return "acknowledged";
        case Status::Remediated: return "remediated";
        case Status::Published: return "published";
    }
    return "disclosed";
}

std::optional<Status> status_from_string(std::string_view name) {
    if (name == "disclosed") return Status::Disclosed;
    if (name == "acknowledged") return Status::Acknowledged;
    if (name == "remediated") return Status::Remediated;
    if (name == "published") return Status::Published;
    return std::nullopt;
}

bool legal_update(Status from, Status to) {
    return (from == Status::Disclosed && to == Status::Acknowledged) ||
           (from == Status::Acknowledged && to == Status::Remediated);
}

bool may_publish(Status current, std::uint64_t disclosed_at,
                 std::uint64_t embargo_blocks, std::uint64_t now_height) {
    if (current == Status::Remediated) return true;
    if (current == Status::Disclosed || current == Status::Acknowledged) {
        return now_height >= disclosed_at + embargo_blocks;
    }
    return false;
}

Digest disclosure_id(const Address& registry, const Address& discoverer,
                     std::string_view ciphertext_location,
                     const Digest& ciphertext_hash) {
    ByteWriter w;
    w.string("certledger.disclosure.v1");
    w.address(registry);
    w.address(discoverer);
    w.string(ciphertext_location);
    w.digest(ciphertext_hash);
    return w.hash();
}

std::optional<DisclosurePackage> prepare_disclosure(
    const PublicKey& manufacturer, std::span<const std::uint8_t> details) {
    auto ciphertext = seal_for(manufacturer, details);
    if (!ciphertext) return std::nullopt;
    DisclosurePackage pkg;
    pkg.ciphertext_hash = sha256(std::span<const std::uint8_t>(*ciphertext));
    pkg.ciphertext = std::move(*ciphertext);
    return pkg;
}

std::optional<std::vector<std::uint8_t>> open_disclosure(
    const KeyPair& manufacturer, std::span<const std::uint8_t> ciphertext) {
    return open_sealed(manufacturer, ciphertext);
}

}  // namespace certledger::vulndisc
