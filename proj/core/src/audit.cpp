// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/audit.hpp"

#include <json.hpp>

namespace certledger::audit {

namespace {

using nlohmann::ordered_json;

}  // namespace

std::string event_to_json(const chain::AuditEvent& event) {
    ordered_json j;
    if (const auto* issued =
            std::get_if<identity::CertificateIssued>(&event.body)) {
        j["type"] = "certificate-issued";
        j["height"] = event.height;
        j["tx"] = to_hex(event.txid);
        j["contract"] = to_hex(event.contract);
        j["owner"] = to_hex(issued->owner);
        j["owner-name"] = issued->owner_name;
        j["subject-name"] = issued->subject_name;
        j["subject-certificate"] = issued->subject_certificate;
    } else if (const auto* revoked =
                   std::get_if<identity::CertificateRevoked>(&event.body)) {
        j["type"] = "certificate-revoked";
        j["height"] = event.height;
        j["tx"] = to_hex(event.txid);
        j["contract"] = to_hex(event.contract);
        j["subject-name"] = revoked->subject_name;
    } else if (const auto* file =
                   std::get_if<registry::RegisterFileEvent>(&event.body)) {
        j["type"] = "register-file";
        j["height"] = event.height;
        j["tx"] = to_hex(event.txid);
        j["contract"] = to_hex(event.contract);
        j["sender"] = to_hex(file->sender);
        j["device-id"] = file->device_id;
        j["file-type"] = file->file_type;
        j["file-location"] = file->file_location;
        j["file-hash"] = to_hex(file->file_hash);
    } else {
        const auto& change = std::get<vulndisc::StatusTransition>(event.body);
        j["type"] = "disclosure-transition";
        j["height"] = event.height;
        j["tx"] = to_hex(event.txid);
        j["contract"] = to_hex(event.contract);
        if (event.disclosure_id) {
            j["disclosure"] = to_hex(*event.disclosure_id);
        }
        j["status"] = std::string(vulndisc::to_string(change.status));
    }
    return j.dump();
}

std::vector<std::string> export_events(const chain::GenesisConfig& config,
                                       const std::vector<chain::Block>& blocks) {
    chain::AuditSink sink;
    chain::replay_chain_file(config, blocks, &sink);
    std::vector<std::string> lines;
    lines.reserve(sink.size());
    for (const auto& event : sink) {
        lines.push_back(event_to_json(event));
    }
    return lines;
}

std::vector<std::string> vulnerability_feed(const chain::LedgerState& state) {
    std::vector<std::string> lines;
    for (const auto& [address, contract] : state.contracts) {
        const auto* reg = std::get_if<registry::RegistryState>(&contract);
        if (reg == nullptr) continue;
        for (const auto& [id, disclosure] : reg->disclosures) {
            if (disclosure.status != vulndisc::Status::Published) continue;
            std::uint64_t published_at = 0;
            for (const auto& t : disclosure.status_log) {
                if (t.status == vulndisc::Status::Published) {
                    published_at = t.block_height;
                }
            }
            ordered_json j;
            j["registry"] = to_hex(address);
            j["device-id"] = reg->device_id;
            j["disclosure"] = to_hex(id);
            j["ciphertext-location"] = disclosure.ciphertext_location;
            j["ciphertext-hash"] = to_hex(disclosure.ciphertext_hash);
            j["disclosed-at"] = disclosure.disclosed_at;
            j["published-at"] = published_at;
            lines.push_back(j.dump());
        }
    }
    return lines;
}

}  // namespace certledger::audit
