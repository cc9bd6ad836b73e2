// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/chain.hpp"

#include <algorithm>
#include <limits>

#include "certledger/codec.hpp"

namespace certledger::chain {

namespace {

// Variant tags in the canonical encoding. Payload tags and call tags are
// frozen; adding new kinds appends, never renumbers.
enum PayloadTag : std::uint8_t {
    kTransfer = 0,
    kDeployAuthority = 1,
    kDeployRegistry = 2,
    kCallContract = 3,
};

enum CallTag : std::uint8_t {
    kIssueCertificate = 0,
    kRevokeCertificate = 1,
    kSetAssessmentBody = 2,
    kRegisterFile = 3,
    kDisclose = 4,
    kUpdateDisclosure = 5,
    kPublishDisclosure = 6,
};

void encode_call(ByteWriter& w, const ContractCall& call) {
    if (const auto* auth = std::get_if<identity::AuthorityCall>(&call)) {
        if (const auto* issue = std::get_if<identity::IssueCertificate>(auth)) {
            w.u8(kIssueCertificate);
            w.string(issue->subject_name);
            w.string(issue->subject_certificate);
        } else {
            const auto& revoke = std::get<identity::RevokeCertificate>(*auth);
            w.u8(kRevokeCertificate);
            w.string(revoke.subject_name);
        }
        return;
    }
    const auto& reg = std::get<registry::RegistryCall>(call);
    if (const auto* set_body = std::get_if<registry::SetAssessmentBody>(&reg)) {
        w.u8(kSetAssessmentBody);
        w.address(set_body->body);
        w.string(set_body->body_name);
        w.address(set_body->body_id_contract);
    } else if (const auto* file = std::get_if<registry::RegisterFile>(&reg)) {
        w.u8(kRegisterFile);
        w.string(file->file_type);
        w.string(file->file_location);
        w.bytes(std::span<const std::uint8_t>(file->file_hash));
    } else if (const auto* disclose = std::get_if<registry::Disclose>(&reg)) {
        w.u8(kDisclose);
        w.string(disclose->ciphertext_location);
        w.digest(disclose->ciphertext_hash);
    } else if (const auto* update = std::get_if<registry::UpdateDisclosure>(&reg)) {
        w.u8(kUpdateDisclosure);
        w.digest(update->id);
        w.u8(static_cast<std::uint8_t>(update->target));
    } else {
        const auto& publish = std::get<registry::PublishDisclosure>(reg);
        w.u8(kPublishDisclosure);
        w.digest(publish.id);
    }
}

void encode_payload(ByteWriter& w, const Payload& payload) {
    if (const auto* transfer = std::get_if<Transfer>(&payload)) {
        w.u8(kTransfer);
        w.address(transfer->to);
        w.u64(transfer->amount);
    } else if (const auto* auth = std::get_if<DeployAuthority>(&payload)) {
        w.u8(kDeployAuthority);
        w.string(auth->init.owner_name);
        w.string(auth->init.owner_certificate);
    } else if (const auto* reg = std::get_if<DeployRegistry>(&payload)) {
        w.u8(kDeployRegistry);
        w.string(reg->init.manufacturer_name);
        w.address(reg->init.manufacturer_id_contract);
        w.string(reg->init.device_id);
    } else {
        const auto& call = std::get<CallContract>(payload);
        w.u8(kCallContract);
        w.address(call.contract);
        encode_call(w, call.call);
    }
}

}  // namespace

std::vector<std::uint8_t> transaction_signing_bytes(const SignedTransaction& tx) {
    ByteWriter w;
    w.string("certledger.tx.v1");
    w.address(tx.sender);
    w.u64(tx.nonce);
    w.u64(tx.fee);
    encode_payload(w, tx.payload);
    return w.data();
}

Digest transaction_id(const SignedTransaction& tx) {
    ByteWriter w;
    w.string("certledger.txid.v1");
    w.bytes(std::span<const std::uint8_t>(transaction_signing_bytes(tx)));
    w.raw(std::span<const std::uint8_t>(tx.signature.bytes));
    return w.hash();
}

SignedTransaction make_transaction(const KeyPair& sender, Payload payload,
                                   std::uint64_t nonce, Amount fee) {
    SignedTransaction tx;
    tx.sender = sender.address();
    tx.sender_key = sender.public_key;
    tx.nonce = nonce;
    tx.fee = fee;
    tx.payload = std::move(payload);
    auto bytes = transaction_signing_bytes(tx);
    tx.signature = sign(sender.private_key, std::span<const std::uint8_t>(bytes));
    return tx;
}

bool verify_transaction_signature(const SignedTransaction& tx) {
    if (derive_address(tx.sender_key) != tx.sender) return false;
    auto bytes = transaction_signing_bytes(tx);
    return verify(tx.sender_key, std::span<const std::uint8_t>(bytes),
                  tx.signature);
}

Digest block_header_digest(const Block& block) {
    ByteWriter w;
    w.string("certledger.block.v1");
    w.u64(block.height);
    w.digest(block.parent_hash);
    w.digest(block.tx_root);
    w.address(block.miner);
    w.u64(block.nonce);
    w.i64(block.timestamp);
    return w.hash();
}

Digest transactions_root(std::span<const SignedTransaction> txs) {
    ByteWriter w;
    w.string("certledger.txroot.v1");
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto& tx : txs) {
        w.digest(transaction_id(tx));
    }
    return w.hash();
}

bool meets_difficulty(const Digest& hash, unsigned bits) {
    unsigned full = bits / 8;
    unsigned rem = bits % 8;
    if (full > hash.size()) return false;
    for (unsigned i = 0; i < full; ++i) {
        if (hash[i] != 0) return false;
    }
    if (rem != 0) {
        if (full >= hash.size()) return false;
        if ((hash[full] >> (8 - rem)) != 0) return false;
    }
    return true;
}

MineResult mine(Block block, unsigned difficulty_bits) {
    block.tx_root = transactions_root(block.transactions);
    MineResult result;
    block.nonce = 0;
    for (;;) {
        ++result.attempts;
        block.hash = block_header_digest(block);
        if (meets_difficulty(block.hash, difficulty_bits)) break;
        ++block.nonce;
    }
    result.block = std::move(block);
    return result;
}

Digest GenesisConfig::digest() const {
    ByteWriter w;
    w.string("certledger.genesis.v1");
    w.u32(difficulty_bits);
    w.u64(reward);
    w.u64(fee);
    w.u32(static_cast<std::uint32_t>(allocations.size()));
    for (const auto& [address, amount] : allocations) {
        w.address(address);
        w.u64(amount);
    }
    w.u32(static_cast<std::uint32_t>(validators.size()));
    for (const auto& v : validators) {
        w.address(v);
    }
    w.u64(embargo_blocks);
    return w.hash();
}

Block GenesisConfig::genesis_block() const {
    Block b;
    b.height = 0;
    b.parent_hash = Digest{};
    b.miner = Address{};
    b.nonce = 0;
    b.timestamp = 0;
    b.tx_root = digest();  // binds the chain to its pre-agreed configuration
    b.hash = block_header_digest(b);
    return b;
}

Amount GenesisConfig::total_allocation() const {
    Amount total = 0;
    for (const auto& [address, amount] : allocations) {
        total += amount;
    }
    return total;
}

Amount LedgerState::balance(const Address& a) const {
    auto it = balances.find(a);
    return it == balances.end() ? 0 : it->second;
}

std::uint64_t LedgerState::nonce(const Address& a) const {
    auto it = next_nonce.find(a);
    return it == next_nonce.end() ? 0 : it->second;
}

Amount LedgerState::total_balance() const {
    Amount total = 0;
    for (const auto& [address, amount] : balances) {
        total += amount;
    }
    return total;
}

const identity::AuthorityState* LedgerState::authority(const Address& a) const {
    auto it = contracts.find(a);
    if (it == contracts.end()) return nullptr;
    return std::get_if<identity::AuthorityState>(&it->second);
}

const registry::RegistryState* LedgerState::registry_at(const Address& a) const {
    auto it = contracts.find(a);
    if (it == contracts.end()) return nullptr;
    return std::get_if<registry::RegistryState>(&it->second);
}

identity::AuthorityLookup LedgerState::authority_lookup() const {
    return [this](const Address& a) { return authority(a); };
}

LedgerState genesis_state(const GenesisConfig& config) {
    LedgerState state;
    for (const auto& [address, amount] : config.allocations) {
        state.balances[address] += amount;
    }
    return state;
}

Address contract_address(const Address& sender, std::uint64_t nonce) {
    ByteWriter w;
    w.string("certledger.contract.v1");
    w.address(sender);
    w.u64(nonce);
    Digest d = w.hash();
    Address a;
    std::copy(d.end() - a.bytes.size(), d.end(), a.bytes.begin());
    return a;
}

namespace {

std::optional<TxError> execute_payload(LedgerState& state,
                                       const SignedTransaction& tx,
                                       const GenesisConfig& config,
                                       std::uint64_t height,
                                       AuditSink* audit) {
    const Digest txid = transaction_id(tx);
    auto record = [&](const Address& contract, auto event,
                      std::optional<Digest> disclosure = {}) {
        if (audit != nullptr) {
            audit->push_back(
                AuditEvent{height, txid, contract, std::move(event), disclosure});
        }
    };

    if (const auto* transfer = std::get_if<Transfer>(&tx.payload)) {
        state.balances[tx.sender] -= transfer->amount;
        state.balances[transfer->to] += transfer->amount;
        return std::nullopt;
    }
    if (const auto* deploy = std::get_if<DeployAuthority>(&tx.payload)) {
        Address addr = contract_address(tx.sender, tx.nonce);
        state.contracts.emplace(addr,
                                identity::make_authority(tx.sender, deploy->init));
        return std::nullopt;
    }
    if (const auto* deploy = std::get_if<DeployRegistry>(&tx.payload)) {
        if (state.authority(deploy->init.manufacturer_id_contract) == nullptr) {
            return TxError{TxErrorCode::UnknownContract,
                           "manufacturer identification contract not found"};
        }
        Address addr = contract_address(tx.sender, tx.nonce);
        state.contracts.emplace(addr,
                                registry::make_registry(tx.sender, deploy->init));
        return std::nullopt;
    }

    const auto& call = std::get<CallContract>(tx.payload);
    auto it = state.contracts.find(call.contract);
    if (it == state.contracts.end()) {
        return TxError{TxErrorCode::UnknownContract, "no contract at address"};
    }
    if (const auto* auth_call = std::get_if<identity::AuthorityCall>(&call.call)) {
        auto* auth = std::get_if<identity::AuthorityState>(&it->second);
        if (auth == nullptr) {
            return TxError{TxErrorCode::UnknownContract,
                           "contract is not an identification authority"};
        }
        auto result = identity::apply(*auth, tx.sender, *auth_call, height);
        if (result.error) return result.error;
        if (result.issued) record(call.contract, *result.issued);
        if (result.revoked) record(call.contract, *result.revoked);
        return std::nullopt;
    }
    const auto& reg_call = std::get<registry::RegistryCall>(call.call);
    auto* reg = std::get_if<registry::RegistryState>(&it->second);
    if (reg == nullptr) {
        return TxError{TxErrorCode::UnknownRegistry,
                       "contract is not a device registry"};
    }
    auto result = registry::apply(*reg, call.contract, tx.sender, reg_call,
                                  height, config.embargo_blocks);
    if (result.error) return result.error;
    if (result.disclosure_change) {
        record(call.contract, *result.disclosure_change, result.disclosure_id);
    }
    if (result.file) record(call.contract, *result.file);
    return std::nullopt;
}

}  // namespace

std::optional<TxError> apply_transaction(LedgerState& state,
                                         const SignedTransaction& tx,
                                         const GenesisConfig& config,
                                         std::uint64_t height,
                                         const Address& miner,
                                         AuditSink* audit) {
    if (!verify_transaction_signature(tx)) {
        return TxError{TxErrorCode::BadSignature,
                       "signature does not verify against the sender key"};
    }
    if (tx.nonce != state.nonce(tx.sender)) {
        return TxError{TxErrorCode::BadNonce,
                       "expected nonce " + std::to_string(state.nonce(tx.sender))};
    }
    Amount required = tx.fee;
    if (const auto* transfer = std::get_if<Transfer>(&tx.payload)) {
        if (transfer->amount > std::numeric_limits<Amount>::max() - required) {
            return TxError{TxErrorCode::InsufficientBalance,
                           "amount plus fee overflows"};
        }
        required += transfer->amount;
    }
    if (required > state.balance(tx.sender)) {
        return TxError{TxErrorCode::InsufficientBalance,
                       "amount plus fee exceeds balance"};
    }

    // Execute against a scratch copy so a failed call leaves no trace.
    LedgerState scratch = state;
    auto error = execute_payload(scratch, tx, config, height, audit);
    if (error) return error;

    scratch.balances[tx.sender] -= tx.fee;
    scratch.balances[miner] += tx.fee;
    scratch.next_nonce[tx.sender] = tx.nonce + 1;
    state = std::move(scratch);
    return std::nullopt;
}

std::string_view to_string(BlockErrorCode code) {
    switch (code) {
        case BlockErrorCode::BadParentHash: return "BadParentHash";
        case BlockErrorCode::BadProofOfWork: return "BadProofOfWork";
        case BlockErrorCode::BadHeight: return "BadHeight";
        case BlockErrorCode::BadTxRoot: return "BadTxRoot";
        case BlockErrorCode::BadBlockHash: return "BadBlockHash";
        case BlockErrorCode::InvalidTransaction: return "InvalidTransaction";
    }
    return "BadBlockHash";
}

std::optional<BlockError> validate_and_apply_block(LedgerState& state,
                                                   const Block& block,
                                                   const Digest& parent_hash,
                                                   std::uint64_t parent_height,
                                                   const GenesisConfig& config,
                                                   AuditSink* audit) {
    if (block.height != parent_height + 1) {
        return BlockError{BlockErrorCode::BadHeight, 0, std::nullopt,
                          "expected height " + std::to_string(parent_height + 1)};
    }
    if (block.parent_hash != parent_hash) {
        return BlockError{BlockErrorCode::BadParentHash, 0, std::nullopt,
                          "parent hash does not match chain head"};
    }
    if (block.tx_root != transactions_root(block.transactions)) {
        return BlockError{BlockErrorCode::BadTxRoot, 0, std::nullopt,
                          "tx-root does not commit to the transactions"};
    }
    if (block.hash != block_header_digest(block)) {
        return BlockError{BlockErrorCode::BadBlockHash, 0, std::nullopt,
                          "block hash does not match header"};
    }
    if (!meets_difficulty(block.hash, config.difficulty_bits)) {
        return BlockError{BlockErrorCode::BadProofOfWork, 0, std::nullopt,
                          "hash misses the difficulty target"};
    }

    LedgerState scratch = state;
    scratch.balances[block.miner] += config.reward;
    const std::size_t audit_mark = audit == nullptr ? 0 : audit->size();
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        auto error = apply_transaction(scratch, block.transactions[i], config,
                                       block.height, block.miner, audit);
        if (error) {
            if (audit != nullptr) audit->resize(audit_mark);
            return BlockError{BlockErrorCode::InvalidTransaction, i, error,
                              std::string(to_string(error->code))};
        }
    }
    state = std::move(scratch);
    return std::nullopt;
}

ReplayResult replay(const GenesisConfig& config, std::span<const Block> blocks,
                    AuditSink* audit) {
    ReplayResult result;
    LedgerState state = genesis_state(config);
    Block genesis = config.genesis_block();
    Digest parent_hash = genesis.hash;
    std::uint64_t parent_height = 0;
    for (const auto& block : blocks) {
        auto error = validate_and_apply_block(state, block, parent_hash,
                                              parent_height, config, audit);
        if (error) {
            result.error = ReplayError{block.height, *error};
            return result;
        }
        parent_hash = block.hash;
        parent_height = block.height;
    }
    result.state = std::move(state);
    return result;
}

}  // namespace certledger::chain
