// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "certledger/identity.hpp"
#include "certledger/mud.hpp"
#include "certledger/node.hpp"
#include "certledger/store.hpp"

namespace certledger::controller {

// Simulated SDN controller: authenticates joining devices, walks their
// identity chain to the trusted root, pulls the registered MUD file through
// the off-chain store, compiles it and filters traffic. Every verification
// failure quarantines the device (deny-all, zero installed rules).

struct PacketFlow {
    Address src;
    Address dst;
    int protocol = 0;
    int src_port = 0;
    int dst_port = 0;

    bool operator==(const PacketFlow&) const = default;
};

enum class DeviceStatus { Pending, Onboarded, Quarantined };

std::string_view to_string(DeviceStatus s);

enum class OnboardFailure {
    ChainInvalid,
    NoMudRegistered,
    FetchFailed,
    HashMismatch,
    MudInvalid,
};

std::string_view to_string(OnboardFailure f);

struct OnboardError {
    OnboardFailure kind = OnboardFailure::ChainInvalid;
    std::string detail;
};

struct OnboardRequest {
    Address device;
    std::string device_id;
    Address registry_contract;
    identity::IdentityChain identity_chain;
};

struct DeviceRecord {
    Address device;
    std::string device_id;
    Address registry_contract;
    std::string mfg_name;
    std::vector<mud::AclRule> rules;
    std::int64_t mud_fetched_at = 0;
    int cache_validity_hours = 48;
    DeviceStatus status = DeviceStatus::Pending;
    std::optional<OnboardError> failure;
    OnboardRequest request;  // kept for refresh
};

struct Decision {
    bool allow = false;
    std::string matched_rule;  // rule id when allowed
    std::string reason;        // "NotOnboarded" | "Unmatched" when denied

    static Decision allowed(std::string rule) {
        return {true, std::move(rule), ""};
    }
    static Decision denied(std::string reason) {
        return {false, "", std::move(reason)};
    }
};

// Default deny: a flow passes only if some installed rule matches it with
// the device bound to the rule's direction.
Decision filter(const DeviceRecord& record, const PacketFlow& flow);

struct AuthProof {
    Address device;
    std::string device_id;
    std::string credential;  // SubjectCertificate encoding, role "device"
    Digest challenge{};
    Signature signature;
};

// Challenge-response binding: the device signs domain || challenge || its
// own address.
std::vector<std::uint8_t> auth_signing_bytes(const Digest& challenge,
                                             const Address& device);
AuthProof make_auth_proof(const KeyPair& device_keys,
                          const std::string& device_id,
                          const std::string& credential,
                          const Digest& challenge);

enum class AuthFailure { BadSignature, StaleChallenge, CredentialMismatch };

std::string_view to_string(AuthFailure f);

struct AuthResult {
    bool authenticated = false;
    std::optional<AuthFailure> failure;
};

struct OnboardResult {
    DeviceStatus status = DeviceStatus::Quarantined;
    std::optional<OnboardError> error;
    std::size_t installed_rules = 0;
};

enum class RefreshOutcome { Unchanged, Reonboarded, Quarantined };

std::string_view to_string(RefreshOutcome o);

class Controller {
  public:
    using Clock = std::function<std::int64_t()>;
    using ChallengeSource = std::function<Digest()>;

    // `ledger` is the embedded read-only observer view of the chain.
    Controller(Address trusted_root, std::shared_ptr<const chain::Node> ledger,
               store::ContentStore& store, Clock clock = nullptr,
               ChallengeSource challenges = nullptr);

    Digest issue_challenge();

    // Challenges are single-use: any authentication attempt consumes one.
    AuthResult authenticate(const AuthProof& proof);

    OnboardResult onboard(const OnboardRequest& request);

    Decision filter_flow(const Address& device, const PacketFlow& flow) const;

    RefreshOutcome refresh(const Address& device, std::int64_t now);
    RefreshOutcome refresh(const Address& device);

    void set_inventory(mud::Inventory inventory);
    const mud::Inventory& inventory() const { return inventory_; }

    std::optional<DeviceRecord> record(const Address& device) const;

  private:
    DeviceRecord run_onboarding(const OnboardRequest& request) const;

    Address trusted_root_;
    std::shared_ptr<const chain::Node> ledger_;
    store::ContentStore& store_;
    Clock clock_;
    ChallengeSource challenges_;
    mud::Inventory inventory_;

    mutable std::mutex mu_;
    std::set<Digest> outstanding_challenges_;
    std::set<Address> authenticated_;
    std::map<Address, DeviceRecord> records_;
};

}  // namespace certledger::controller
