// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/identity.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <utility>

namespace certledger::identity {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Role, std::string_view>, 5> kRoleNames{{
    {Role::MemberStateAuthority, "member-state-authority"},
    {Role::Manufacturer, "manufacturer"},
    {Role::ConformityAssessmentBody, "conformity-assessment-body"},
    {Role::Device, "device"},
    {Role::VerifiedConsumer, "verified-consumer"},
}};

}  // namespace

std::string_view to_string(Role role) {
    for (const auto& [r, name] : kRoleNames) {
        if (r == role) return name;
    }
    return "device";
}

std::optional<Role> role_from_string(std::string_view name) {
    for (const auto& [r, n] : kRoleNames) {
        if (n == name) return r;
    }
    return std::nullopt;
}

std::string SubjectCertificate::encode() const {
    // Fixed key order; emitted manually so the encoding stays byte-exact.
    std::string out = "{";
    auto field = [&out](std::string_view key, const std::string& value,
                        bool last = false) {
        out += json(std::string(key)).dump();
        out += ":";
        out += json(value).dump();
        if (!last) out += ",";
    };
    field("subject-address", to_hex(subject_address));
    field("public-key", to_hex(subject_public_key));
    field("role", std::string(to_string(role)));
    field("metadata", metadata, /*last=*/true);
    out += "}";
    return out;
}

std::optional<SubjectCertificate> SubjectCertificate::decode(
    std::string_view text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) return std::nullopt;
    if (!j.contains("subject-address") || !j.contains("public-key") ||
        !j.contains("role") || !j.contains("metadata")) {
        return std::nullopt;
    }
    if (!j["subject-address"].is_string() || !j["public-key"].is_string() ||
        !j["role"].is_string() || !j["metadata"].is_string()) {
        return std::nullopt;
    }
    auto address = address_from_hex(j["subject-address"].get<std::string>());
    auto key = public_key_from_hex(j["public-key"].get<std::string>());
    auto role = role_from_string(j["role"].get<std::string>());
    if (!address || !key || !role) return std::nullopt;
    if (derive_address(*key) != *address) return std::nullopt;
    SubjectCertificate cert;
    cert.subject_address = *address;
    cert.subject_public_key = *key;
    cert.role = *role;
    cert.metadata = j["metadata"].get<std::string>();
    return cert;
}

SubjectCertificate SubjectCertificate::for_key(const PublicKey& key, Role role,
                                               std::string metadata) {
    SubjectCertificate cert;
    cert.subject_address = derive_address(key);
    cert.subject_public_key = key;
    cert.role = role;
    cert.metadata = std::move(metadata);
    return cert;
}

AuthorityState make_authority(const Address& owner, const AuthorityInit& init) {
    AuthorityState state;
    state.owner = owner;
    state.owner_name = init.owner_name;
    state.owner_certificate = init.owner_certificate;
    return state;
}

const CertificateIssued* latest_issued(const AuthorityState& state,
                                       std::string_view subject_name) {
    for (auto it = state.issued.rbegin(); it != state.issued.rend(); ++it) {
        if (it->subject_name == subject_name) return &*it;
    }
    return nullptr;
}

AuthorityApplyResult apply(AuthorityState& state, const Address& sender,
                           const AuthorityCall& call, std::uint64_t height) {
    AuthorityApplyResult result;
    if (sender != state.owner) {
        result.error = TxError{TxErrorCode::NotOwner,
                               "sender is not the authority owner"};
        return result;
    }
    if (const auto* issue = std::get_if<IssueCertificate>(&call)) {
        CertificateIssued event;
        event.owner = sender;
        event.owner_name = state.owner_name;
        event.subject_name = issue->subject_name;
        event.subject_certificate = issue->subject_certificate;
        event.block_height = height;
        state.issued.push_back(event);
        result.issued = event;
        return result;
    }
    const auto& revoke = std::get<RevokeCertificate>(call);
    CertificateRevoked event;
    event.subject_name = revoke.subject_name;
    event.block_height = height;
    state.revoked.push_back(event);
    result.revoked = event;
    return result;
}

namespace {

// Latest issue/revoke pair wins: a certificate stands iff its subject name's
// most recent issuance is strictly newer than any revocation.
bool name_stands(const AuthorityState& auth, const std::string& subject_name) {
    std::optional<std::uint64_t> last_issued;
    for (const auto& e : auth.issued) {
        if (e.subject_name == subject_name) last_issued = e.block_height;
    }
    if (!last_issued) return false;
    for (const auto& r : auth.revoked) {
        if (r.subject_name == subject_name && r.block_height >= *last_issued) {
            return false;
        }
    }
    return true;
}

}  // namespace

VerifyResult verify_chain(const AuthorityLookup& lookup, const Address& root,
                          const IdentityChain& chain) {
    if (chain.links.empty()) {
        return VerifyResult::fail(ChainFailure::BadRoot, 0);
    }
    if (chain.links.front().authority != root) {
        return VerifyResult::fail(ChainFailure::BadRoot, 0);
    }
    if (chain.links.size() > 4) {
        // Nothing below the device/consumer level may act as an authority.
        return VerifyResult::fail(ChainFailure::BrokenOwnership, 4);
    }
    for (std::size_t i = 0; i < chain.links.size(); ++i) {
        const auto& link = chain.links[i];
        const std::size_t level = i + 1;
        const AuthorityState* auth = lookup(link.authority);
        if (auth == nullptr) {
            return i == 0 ? VerifyResult::fail(ChainFailure::BadRoot, 0)
                          : VerifyResult::fail(ChainFailure::NotIssued, level);
        }
        if (std::find(auth->issued.begin(), auth->issued.end(), link.event) ==
            auth->issued.end()) {
            return VerifyResult::fail(ChainFailure::NotIssued, level);
        }
        if (!name_stands(*auth, link.event.subject_name)) {
            return VerifyResult::fail(ChainFailure::Revoked, level);
        }
        if (i + 1 < chain.links.size()) {
            auto cert = SubjectCertificate::decode(link.event.subject_certificate);
            if (!cert) {
                return VerifyResult::fail(ChainFailure::BrokenOwnership, level);
            }
            const AuthorityState* next = lookup(chain.links[i + 1].authority);
            if (next == nullptr || next->owner != cert->subject_address) {
                return VerifyResult::fail(ChainFailure::BrokenOwnership,
                                          level + 1);
            }
        }
    }
    return VerifyResult::ok();
}

std::string_view to_string(ChainFailure f) {
    switch (f) {
        case ChainFailure::BadRoot: return "BadRoot";
        case ChainFailure::NotIssued: return "NotIssued";
        case ChainFailure::Revoked: return "Revoked";
        case ChainFailure::BrokenOwnership: return "BrokenOwnership";
    }
    return "BadRoot";
}

ConsumerRegistration make_anonymous_consumer(
    const std::string& device_id, const std::optional<Digest>& seed) {
    ConsumerRegistration reg;
    reg.consumer_keys = seed ? keypair_from_seed(*seed) : generate_keypair();
    // The subject name is the fresh address itself: no field of the issued
    // event can carry a pre-existing consumer identifier.
    reg.subject_name = to_hex(reg.consumer_keys.address());
    reg.call.subject_name = reg.subject_name;
    reg.call.subject_certificate =
        SubjectCertificate::for_key(reg.consumer_keys.public_key,
                                    Role::VerifiedConsumer, device_id)
            .encode();
    return reg;
}

}  // namespace certledger::identity
