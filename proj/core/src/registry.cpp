// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/registry.hpp"

#include <algorithm>
#include <cstring>

namespace certledger::registry {

RegistryState make_registry(const Address& manufacturer,
                            const RegistryInit& init) {
    RegistryState state;
    state.manufacturer = manufacturer;
    state.manufacturer_name = init.manufacturer_name;
    state.manufacturer_id_contract = init.manufacturer_id_contract;
    state.device_id = init.device_id;
    state.assessment_body = manufacturer;
    return state;
}

namespace {

RegistryApplyResult fail(TxErrorCode code, std::string detail) {
    RegistryApplyResult r;
    r.error = TxError{code, std::move(detail)};
    return r;
}

RegistryApplyResult apply_set_body(RegistryState& state, const Address& sender,
                                   const SetAssessmentBody& call) {
    if (sender != state.manufacturer) {
        return fail(TxErrorCode::NotManufacturer,
                    "only the manufacturer may designate an assessment body");
    }
    state.assessment_body = call.body;
    state.assessment_body_name = call.body_name;
    state.assessment_body_id_contract = call.body_id_contract;
    return {};
}

RegistryApplyResult apply_register_file(RegistryState& state,
                                        const Address& sender,
                                        const RegisterFile& call,
                                        std::uint64_t height) {
    if (sender != state.manufacturer && sender != state.assessment_body) {
        return fail(TxErrorCode::NotAuthorized,
                    "sender is neither manufacturer nor assessment body");
    }
    if (call.file_hash.size() != 32) {
        return fail(TxErrorCode::BadHashLength,
                    "file hash must be exactly 32 bytes");
    }
    if (call.file_type.empty()) {
        return fail(TxErrorCode::InvalidArgument, "file type must be non-empty");
    }
    RegisterFileEvent event;
    event.sender = sender;
    event.device_id = state.device_id;
    event.file_type = call.file_type;
    event.file_location = call.file_location;
    std::memcpy(event.file_hash.data(), call.file_hash.data(), 32);
    event.block_height = height;
    state.file_log.push_back(event);
    RegistryApplyResult r;
    r.file = event;
    return r;
}

RegistryApplyResult apply_disclose(RegistryState& state, const Address& self,
                                   const Address& sender, const Disclose& call,
                                   std::uint64_t height) {
    vulndisc::Disclosure d;
    d.id = vulndisc::disclosure_id(self, sender, call.ciphertext_location,
                                   call.ciphertext_hash);
    if (state.disclosures.contains(d.id)) {
        return fail(TxErrorCode::InvalidArgument,
                    "identical disclosure already recorded");
    }
    d.discoverer = sender;
    d.ciphertext_location = call.ciphertext_location;
    d.ciphertext_hash = call.ciphertext_hash;
    d.disclosed_at = height;
    d.status = vulndisc::Status::Disclosed;
    d.status_log.push_back({vulndisc::Status::Disclosed, height});
    RegistryApplyResult r;
    r.disclosure_change = d.status_log.back();
    r.disclosure_id = d.id;
    state.disclosures.emplace(d.id, std::move(d));
    return r;
}

RegistryApplyResult apply_update(RegistryState& state, const Address& sender,
                                 const UpdateDisclosure& call,
                                 std::uint64_t height) {
    auto it = state.disclosures.find(call.id);
    if (it == state.disclosures.end()) {
        return fail(TxErrorCode::UnknownDisclosure, "no such disclosure");
    }
    if (call.target != vulndisc::Status::Acknowledged &&
        call.target != vulndisc::Status::Remediated) {
        return fail(TxErrorCode::IllegalTransition,
                    "update may only target acknowledged or remediated");
    }
    if (sender != state.manufacturer) {
        return fail(TxErrorCode::NotManufacturer,
                    "only the manufacturer may update a disclosure");
    }
    auto& d = it->second;
    if (!vulndisc::legal_update(d.status, call.target)) {
        return fail(TxErrorCode::IllegalTransition,
                    std::string(vulndisc::to_string(d.status)) + " -> " +
                        std::string(vulndisc::to_string(call.target)));
    }
    d.status = call.target;
    d.status_log.push_back({call.target, height});
    RegistryApplyResult r;
    r.disclosure_change = d.status_log.back();
    r.disclosure_id = d.id;
    return r;
}

RegistryApplyResult apply_publish(RegistryState& state, const Address& sender,
                                  const PublishDisclosure& call,
                                  std::uint64_t height,
                                  std::uint64_t embargo_blocks) {
    auto it = state.disclosures.find(call.id);
    if (it == state.disclosures.end()) {
        return fail(TxErrorCode::UnknownDisclosure, "no such disclosure");
    }
    auto& d = it->second;
    if (sender != d.discoverer && sender != state.manufacturer) {
        return fail(TxErrorCode::NotParty,
                    "only the discoverer or the manufacturer may publish");
    }
    if (d.status == vulndisc::Status::Published) {
        return fail(TxErrorCode::IllegalTransition, "already published");
    }
    if (!vulndisc::may_publish(d.status, d.disclosed_at, embargo_blocks,
                               height)) {
        return fail(TxErrorCode::EmbargoActive,
                    "embargo has not elapsed and the vulnerability is not "
                    "remediated");
    }
    d.status = vulndisc::Status::Published;
    d.status_log.push_back({vulndisc::Status::Published, height});

    // Publication materializes in the registry's public record.
    RegisterFileEvent event;
    event.sender = sender;
    event.device_id = state.device_id;
    event.file_type = std::string(kFileTypeVulnerability);
    event.file_location = d.ciphertext_location;
    event.file_hash = d.ciphertext_hash;
    event.block_height = height;
    state.file_log.push_back(event);

    RegistryApplyResult r;
    r.disclosure_change = d.status_log.back();
    r.disclosure_id = d.id;
    r.file = event;
    return r;
}

}  // namespace

RegistryApplyResult apply(RegistryState& state, const Address& self,
                          const Address& sender, const RegistryCall& call,
                          std::uint64_t height, std::uint64_t embargo_blocks) {
    if (const auto* set_body = std::get_if<SetAssessmentBody>(&call)) {
        return apply_set_body(state, sender, *set_body);
    }
    if (const auto* reg = std::get_if<RegisterFile>(&call)) {
        return apply_register_file(state, sender, *reg, height);
    }
    if (const auto* disclose = std::get_if<Disclose>(&call)) {
        return apply_disclose(state, self, sender, *disclose, height);
    }
    if (const auto* update = std::get_if<UpdateDisclosure>(&call)) {
        return apply_update(state, sender, *update, height);
    }
    return apply_publish(state, sender, std::get<PublishDisclosure>(call),
                         height, embargo_blocks);
}

const RegisterFileEvent* latest_file(const RegistryState& state,
                                     std::string_view file_type) {
    for (auto it = state.file_log.rbegin(); it != state.file_log.rend(); ++it) {
        if (it->file_type == file_type) return &*it;
    }
    return nullptr;
}

}  // namespace certledger::registry
