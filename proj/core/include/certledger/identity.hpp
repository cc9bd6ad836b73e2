// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "certledger/crypto.hpp"
#include "certledger/errors.hpp"

namespace certledger::identity {

// Identification-authority contract: the owner appends certificate
// issuance/revocation events to two append-only logs. The same contract kind
// is instantiated at every level of the hierarchy (EU root, member state,
// manufacturer).

enum class Role {
    MemberStateAuthority,
    Manufacturer,
    ConformityAssessmentBody,
    Device,
    VerifiedConsumer,
};

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view name);

// Certificate payload carried as an opaque string on-chain. The canonical
// encoding is JSON with this exact key order:
//   {"subject-address":"0x..","public-key":"0x..","role":"..","metadata":".."}
// decode() rejects strings whose subject-address does not match the embedded
// public key.
struct SubjectCertificate {
    Address subject_address;
    PublicKey subject_public_key;
    Role role = Role::Device;
    std::string metadata;

    std::string encode() const;
    static std::optional<SubjectCertificate> decode(std::string_view text);

    static SubjectCertificate for_key(const PublicKey& key, Role role,
                                      std::string metadata);

    bool operator==(const SubjectCertificate&) const = default;
};

struct CertificateIssued {
    Address owner;
    std::string owner_name;
    std::string subject_name;
    std::string subject_certificate;
    std::uint64_t block_height = 0;

    bool operator==(const CertificateIssued&) const = default;
};

struct CertificateRevoked {
    std::string subject_name;
    std::uint64_t block_height = 0;

    bool operator==(const CertificateRevoked&) const = default;
};

struct AuthorityInit {
    std::string owner_name;
    std::string owner_certificate;

    bool operator==(const AuthorityInit&) const = default;
};

struct IssueCertificate {
    std::string subject_name;
    std::string subject_certificate;

    bool operator==(const IssueCertificate&) const = default;
};

struct RevokeCertificate {
    std::string subject_name;

    bool operator==(const RevokeCertificate&) const = default;
};

using AuthorityCall = std::variant<IssueCertificate, RevokeCertificate>;

struct AuthorityState {
    Address owner;
    std::string owner_name;
    std::string owner_certificate;
    std::vector<CertificateIssued> issued;
    std::vector<CertificateRevoked> revoked;

    bool operator==(const AuthorityState&) const = default;
};

struct AuthorityApplyResult {
    std::optional<TxError> error;
    std::optional<CertificateIssued> issued;
    std::optional<CertificateRevoked> revoked;
};

AuthorityState make_authority(const Address& owner, const AuthorityInit& init);

// Latest issuance event for a subject name, or nullptr.
const CertificateIssued* latest_issued(const AuthorityState& state,
                                       std::string_view subject_name);

// Only the owner may mutate; everything else is rejected with NotOwner and
// leaves the state untouched.
AuthorityApplyResult apply(AuthorityState& state, const Address& sender,
                           const AuthorityCall& call, std::uint64_t height);

// Hierarchy verification (log-based PKI walk from the trusted EU anchor).

struct ChainLink {
    Address authority;
    CertificateIssued event;
};

struct IdentityChain {
    std::vector<ChainLink> links;
};

enum class ChainFailure { BadRoot, NotIssued, Revoked, BrokenOwnership };

std::string_view to_string(ChainFailure f);

// `level` numbers the certified subject's depth below the root: the root
// authority is level 0, so links[i] certifies the subject at level i + 1.
struct VerifyResult {
    bool valid = false;
    ChainFailure reason = ChainFailure::BadRoot;
    std::size_t level = 0;

    static VerifyResult ok() { return {true, ChainFailure::BadRoot, 0}; }
    static VerifyResult fail(ChainFailure f, std::size_t level) {
        return {false, f, level};
    }
};

using AuthorityLookup = std::function<const AuthorityState*(const Address&)>;

// Valid iff every link's event is present in its authority's issued log, the
// latest issue/revoke pair for that subject name still stands, and each
// link's subject address owns the next link's authority contract. Chains
// deeper than the four-level hierarchy are refused.
VerifyResult verify_chain(const AuthorityLookup& lookup, const Address& root,
                          const IdentityChain& chain);

// Fresh per-device consumer identity: the issued event carries only the new
// random address/key and manufacturer-side data, never a pre-existing
// consumer identifier.
struct ConsumerRegistration {
    KeyPair consumer_keys;
    std::string subject_name;
    IssueCertificate call;
};

ConsumerRegistration make_anonymous_consumer(
    const std::string& device_id, const std::optional<Digest>& seed = {});

}  // namespace certledger::identity
