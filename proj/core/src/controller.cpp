// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/controller.hpp"

#include <chrono>

#include "certledger/codec.hpp"
#include "certledger/registry.hpp"

namespace certledger::controller {

namespace {

std::int64_t wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

Digest random_challenge() {
    auto bytes = random_bytes(32);
    Digest d;
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
}

}  // namespace

std::string_view to_string(DeviceStatus s) {
    switch (s) {
        case DeviceStatus::Pending: return "pending";
        case DeviceStatus::Onboarded: return "onboarded";
        case DeviceStatus::Quarantined: return "quarantined";
    }
    return "pending";
}

std::string_view to_string(OnboardFailure f) {
    switch (f) {
        case OnboardFailure::ChainInvalid: return "ChainInvalid";
        case OnboardFailure::NoMudRegistered: return "NoMudRegistered";
        case OnboardFailure::FetchFailed: return "FetchFailed";
        case OnboardFailure::HashMismatch: return "HashMismatch";
        case OnboardFailure::MudInvalid: return "MudInvalid";
    }
    return "ChainInvalid";
}

std::string_view to_string(AuthFailure f) {
    switch (f) {
        case AuthFailure::BadSignature: return "BadSignature";
        case AuthFailure::StaleChallenge: return "StaleChallenge";
        case AuthFailure::CredentialMismatch: return "CredentialMismatch";
    }
    return "BadSignature";
}

std::string_view to_string(RefreshOutcome o) {
    switch (o) {
        case RefreshOutcome::Unchanged: return "unchanged";
        case RefreshOutcome::Reonboarded: return "re-onboarded";
        case RefreshOutcome::Quarantined: return "quarantined";
    }
    return "unchanged";
}

Decision filter(const DeviceRecord& record, const PacketFlow& flow) {
    if (record.status != DeviceStatus::Onboarded) {
        return Decision::denied("NotOnboarded");
    }
    mud::Direction direction;
    Address peer;
    if (flow.src == record.device) {
        direction = mud::Direction::FromDevice;
        peer = flow.dst;
    } else if (flow.dst == record.device) {
        direction = mud::Direction::ToDevice;
        peer = flow.src;
    } else {
        return Decision::denied("Unmatched");
    }
    for (const auto& rule : record.rules) {
        if (rule.direction != direction) continue;
        if (!rule.any_peer && !rule.peers.contains(peer)) continue;
        if (rule.protocol && *rule.protocol != flow.protocol) continue;
        if (rule.src_port && *rule.src_port != flow.src_port) continue;
        if (rule.dst_port && *rule.dst_port != flow.dst_port) continue;
        return Decision::allowed(rule.id());
    }
    return Decision::denied("Unmatched");
}

std::vector<std::uint8_t> auth_signing_bytes(const Digest& challenge,
                                             const Address& device) {
    ByteWriter w;
    w.string("certledger.auth.v1");
    w.digest(challenge);
    w.address(device);
    return w.data();
}

AuthProof make_auth_proof(const KeyPair& device_keys,
                          const std::string& device_id,
                          const std::string& credential,
                          const Digest& challenge) {
    AuthProof proof;
    proof.device = device_keys.address();
    proof.device_id = device_id;
    proof.credential = credential;
    proof.challenge = challenge;
    auto bytes = auth_signing_bytes(challenge, proof.device);
    proof.signature =
        sign(device_keys.private_key, std::span<const std::uint8_t>(bytes));
    return proof;
}

Controller::Controller(Address trusted_root,
                       std::shared_ptr<const chain::Node> ledger,
                       store::ContentStore& store, Clock clock,
                       ChallengeSource challenges)
    : trusted_root_(trusted_root),
      ledger_(std::move(ledger)),
      store_(store),
      clock_(clock ? std::move(clock) : Clock(wall_clock)),
      challenges_(challenges ? std::move(challenges)
                             : ChallengeSource(random_challenge)) {}

Digest Controller::issue_challenge() {
    std::lock_guard lock(mu_);
    Digest challenge = challenges_();
    outstanding_challenges_.insert(challenge);
    return challenge;
}

AuthResult Controller::authenticate(const AuthProof& proof) {
    std::lock_guard lock(mu_);
    if (outstanding_challenges_.erase(proof.challenge) == 0) {
        return {false, AuthFailure::StaleChallenge};
    }
    auto cert = identity::SubjectCertificate::decode(proof.credential);
    if (!cert || cert->role != identity::Role::Device ||
        cert->subject_address != proof.device) {
        return {false, AuthFailure::CredentialMismatch};
    }
    auto bytes = auth_signing_bytes(proof.challenge, proof.device);
    if (!verify(cert->subject_public_key,
                std::span<const std::uint8_t>(bytes), proof.signature)) {
        return {false, AuthFailure::BadSignature};
    }
    authenticated_.insert(proof.device);
    return {true, std::nullopt};
}

DeviceRecord Controller::run_onboarding(const OnboardRequest& request) const {
    DeviceRecord record;
    record.device = request.device;
    record.device_id = request.device_id;
    record.registry_contract = request.registry_contract;
    record.request = request;
    record.status = DeviceStatus::Quarantined;

    auto quarantine = [&record](OnboardFailure kind, std::string detail) {
        record.failure = OnboardError{kind, std::move(detail)};
        record.rules.clear();
        return record;
    };

    // Snapshot of the ledger as seen by the embedded observer.
    const chain::LedgerState state = ledger_->state();

    auto verdict = identity::verify_chain(state.authority_lookup(),
                                          trusted_root_,
                                          request.identity_chain);
    if (!verdict.valid) {
        return quarantine(OnboardFailure::ChainInvalid,
                          std::string(identity::to_string(verdict.reason)) +
                              " at level " + std::to_string(verdict.level));
    }

    const registry::RegistryState* reg =
        state.registry_at(request.registry_contract);
    if (reg == nullptr) {
        return quarantine(OnboardFailure::NoMudRegistered,
                          "registry contract not found");
    }
    const registry::RegisterFileEvent* mud_ref =
        registry::latest_file(*reg, registry::kFileTypeMud);
    if (mud_ref == nullptr) {
        return quarantine(OnboardFailure::NoMudRegistered,
                          "no MUD file registered for this device type");
    }

    auto content = store_.get(mud_ref->file_location);
    if (!content) {
        return quarantine(OnboardFailure::FetchFailed,
                          "off-chain object missing: " + mud_ref->file_location);
    }
    if (!store::ContentStore::verify(std::span<const std::uint8_t>(*content),
                                     mud_ref->file_hash)) {
        return quarantine(OnboardFailure::HashMismatch,
                          "fetched MUD file does not match the on-chain hash");
    }

    mud::MudFile parsed;
    try {
        parsed = mud::parse(std::span<const std::uint8_t>(*content));
    } catch (const mud::ParseError& e) {
        return quarantine(OnboardFailure::MudInvalid, e.what());
    }
    auto violations = mud::validate(parsed);
    if (!violations.empty()) {
        std::string detail;
        for (const auto& v : violations) {
            if (!detail.empty()) detail += "; ";
            detail += v.code + " at " + v.path;
        }
        return quarantine(OnboardFailure::MudInvalid, detail);
    }

    auto rules = mud::compile(parsed, inventory_);
    if (rules.empty()) {
        // Onboarded devices always carry at least one rule; a file that
        // compiles to nothing stays quarantined.
        return quarantine(OnboardFailure::MudInvalid,
                          "file compiles to an empty rule set");
    }

    record.mfg_name = parsed.mfg_name;
    record.rules = std::move(rules);
    record.mud_fetched_at = clock_();
    record.cache_validity_hours = parsed.cache_validity;
    record.status = DeviceStatus::Onboarded;
    record.failure.reset();
    return record;
}

OnboardResult Controller::onboard(const OnboardRequest& request) {
    DeviceRecord record = run_onboarding(request);
    OnboardResult result;
    result.status = record.status;
    result.error = record.failure;
    result.installed_rules = record.rules.size();
    std::lock_guard lock(mu_);
    records_[request.device] = std::move(record);
    return result;
}

Decision Controller::filter_flow(const Address& device,
                                 const PacketFlow& flow) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(device);
    if (it == records_.end()) {
        return Decision::denied("NotOnboarded");
    }
    return filter(it->second, flow);
}

RefreshOutcome Controller::refresh(const Address& device) {
    return refresh(device, clock_());
}

RefreshOutcome Controller::refresh(const Address& device, std::int64_t now) {
    OnboardRequest request;
    {
        std::lock_guard lock(mu_);
        auto it = records_.find(device);
        if (it == records_.end()) {
            return RefreshOutcome::Quarantined;
        }
        const DeviceRecord& current = it->second;
        if (current.status == DeviceStatus::Onboarded &&
            mud::is_fresh(current.cache_validity_hours, current.mud_fetched_at,
                          now)) {
            return RefreshOutcome::Unchanged;
        }
        request = current.request;
    }

    // Re-run the verification pipeline outside the lock and swap the record
    // in whole, so readers only ever observe the old or the new rule set.
    DeviceRecord fresh = run_onboarding(request);
    const RefreshOutcome outcome = fresh.status == DeviceStatus::Onboarded
                                       ? RefreshOutcome::Reonboarded
                                       : RefreshOutcome::Quarantined;
    std::lock_guard lock(mu_);
    records_[device] = std::move(fresh);
    return outcome;
}

void Controller::set_inventory(mud::Inventory inventory) {
    inventory_ = std::move(inventory);
}

std::optional<DeviceRecord> Controller::record(const Address& device) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(device);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

}  // namespace certledger::controller
