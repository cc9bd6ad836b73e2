// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "certledger/crypto.hpp"
#include "certledger/errors.hpp"
#include "certledger/vulndisc.hpp"

namespace certledger::registry {

// Device-registry contract: one instance per device type/model. The
// manufacturer (or the assessment body it designates) appends authoritative
// file references; the disclosure functions track coordinated vulnerability
// reports against the same device type.

// Well-known file types. Any other non-empty string is accepted too.
inline constexpr std::string_view kFileTypeMud = "MUD";
inline constexpr std::string_view kFileTypeFirmware = "FIRMWARE";
inline constexpr std::string_view kFileTypeCertificate = "CERTIFICATE";
inline constexpr std::string_view kFileTypeTestReport = "TEST_REPORT";
inline constexpr std::string_view kFileTypeVulnerability = "VULNERABILITY";

struct RegisterFileEvent {
    Address sender;
    std::string device_id;
    std::string file_type;
    std::string file_location;
    Digest file_hash{};
    std::uint64_t block_height = 0;

    bool operator==(const RegisterFileEvent&) const = default;
};

struct RegistryInit {
    std::string manufacturer_name;
    Address manufacturer_id_contract;
    std::string device_id;

    bool operator==(const RegistryInit&) const = default;
};

struct SetAssessmentBody {
    Address body;
    std::string body_name;
    Address body_id_contract;

    bool operator==(const SetAssessmentBody&) const = default;
};

// The hash travels as raw bytes so a wrong-length value is representable and
// rejected at execution with BadHashLength.
struct RegisterFile {
    std::string file_type;
    std::string file_location;
    std::vector<std::uint8_t> file_hash;

    bool operator==(const RegisterFile&) const = default;
};

struct Disclose {
    std::string ciphertext_location;
    Digest ciphertext_hash{};

    bool operator==(const Disclose&) const = default;
};

struct UpdateDisclosure {
    Digest id{};
    vulndisc::Status target = vulndisc::Status::Acknowledged;

    bool operator==(const UpdateDisclosure&) const = default;
};

struct PublishDisclosure {
    Digest id{};

    bool operator==(const PublishDisclosure&) const = default;
};

using RegistryCall = std::variant<SetAssessmentBody, RegisterFile, Disclose,
                                  UpdateDisclosure, PublishDisclosure>;

struct RegistryState {
    Address manufacturer;
    std::string manufacturer_name;
    Address manufacturer_id_contract;
    std::string device_id;
    Address assessment_body;
    std::string assessment_body_name;
    Address assessment_body_id_contract;
    std::vector<RegisterFileEvent> file_log;
    std::map<Digest, vulndisc::Disclosure> disclosures;

    bool operator==(const RegistryState&) const = default;
};

// At construction the manufacturer is its own assessment body.
RegistryState make_registry(const Address& manufacturer,
                            const RegistryInit& init);

struct RegistryApplyResult {
    std::optional<TxError> error;
    std::optional<RegisterFileEvent> file;
    std::optional<vulndisc::StatusTransition> disclosure_change;
    std::optional<Digest> disclosure_id;
};

// registerFile uses OR semantics: the manufacturer or the currently
// designated assessment body may append. setAssessmentBody is
// manufacturer-only. Disclosure calls enforce the transition graph and the
// embargo policy; publication appends a VULNERABILITY entry to the file log.
// `self` is the registry contract's own address (used to derive disclosure
// ids).
RegistryApplyResult apply(RegistryState& state, const Address& self,
                          const Address& sender, const RegistryCall& call,
                          std::uint64_t height, std::uint64_t embargo_blocks);

// Highest-block event of the given type; in-block ties resolve to the later
// entry because the log preserves application order.
const RegisterFileEvent* latest_file(const RegistryState& state,
                                     std::string_view file_type);

}  // namespace certledger::registry
