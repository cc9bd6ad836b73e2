// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "certledger/crypto.hpp"
#include "certledger/errors.hpp"
#include "certledger/identity.hpp"
#include "certledger/registry.hpp"

namespace certledger::chain {

using Amount = std::uint64_t;

// Transaction payloads. Contracts are typed native state machines keyed by a
// contract-kind tag, not bytecode: a deploy carries the constructor
// arguments, a call carries one of the contract's typed functions.
struct Transfer {
    Address to;
    Amount amount = 0;

    bool operator==(const Transfer&) const = default;
};

struct DeployAuthority {
    identity::AuthorityInit init;

    bool operator==(const DeployAuthority&) const = default;
};

struct DeployRegistry {
    registry::RegistryInit init;

    bool operator==(const DeployRegistry&) const = default;
};

using ContractCall = std::variant<identity::AuthorityCall, registry::RegistryCall>;

struct CallContract {
    Address contract;
    ContractCall call;

    bool operator==(const CallContract&) const = default;
};

using Payload = std::variant<Transfer, DeployAuthority, DeployRegistry, CallContract>;

struct SignedTransaction {
    Address sender;
    PublicKey sender_key;
    std::uint64_t nonce = 0;
    Amount fee = 0;
    Payload payload;
    Signature signature;

    bool operator==(const SignedTransaction&) const = default;
};

// Canonical bytes the sender signs (domain "certledger.tx.v1").
std::vector<std::uint8_t> transaction_signing_bytes(const SignedTransaction& tx);
Digest transaction_id(const SignedTransaction& tx);

SignedTransaction make_transaction(const KeyPair& sender, Payload payload,
                                   std::uint64_t nonce, Amount fee);

// Signature valid and the sender address matches the embedded public key.
bool verify_transaction_signature(const SignedTransaction& tx);

struct Block {
    std::uint64_t height = 0;
    Digest parent_hash{};
    Address miner;
    std::uint64_t nonce = 0;
    std::int64_t timestamp = 0;
    Digest tx_root{};
    std::vector<SignedTransaction> transactions;
    Digest hash{};

    bool operator==(const Block&) const = default;
};

Digest block_header_digest(const Block& block);
Digest transactions_root(std::span<const SignedTransaction> txs);

// Proof-of-work target: at least `bits` leading zero bits in the block hash.
bool meets_difficulty(const Digest& hash, unsigned bits);

struct MineResult {
    Block block;
    std::uint64_t attempts = 0;  // header hashes computed (nonce starts at 0)
};

// Fills nonce/hash by scanning nonces from zero. Loops until solved.
MineResult mine(Block block, unsigned difficulty_bits);

// Pre-agreed chain parameters. Serialized as JSON:
//   {"difficulty-bits":8,"reward":2,"fee":1,
//    "allocations":[{"address":"0x..","amount":100}],
//    "validators":["0x.."],"embargo-blocks":144}
// The genesis block commits to this document via its tx-root field.
struct GenesisConfig {
    unsigned difficulty_bits = 8;
    Amount reward = 2;
    Amount fee = 1;
    std::vector<std::pair<Address, Amount>> allocations;
    std::vector<Address> validators;
    std::uint64_t embargo_blocks = 144;

    Digest digest() const;
    Block genesis_block() const;
    Amount total_allocation() const;

    bool operator==(const GenesisConfig&) const = default;
};

using ContractState =
    std::variant<identity::AuthorityState, registry::RegistryState>;

struct LedgerState {
    std::map<Address, Amount> balances;
    std::map<Address, std::uint64_t> next_nonce;
    std::map<Address, ContractState> contracts;

    Amount balance(const Address& a) const;
    std::uint64_t nonce(const Address& a) const;
    Amount total_balance() const;

    const identity::AuthorityState* authority(const Address& a) const;
    const registry::RegistryState* registry_at(const Address& a) const;

    // Authority lookup functor for identity::verify_chain. The returned
    // callable captures `this`; the state must outlive it.
    identity::AuthorityLookup authority_lookup() const;

    bool operator==(const LedgerState&) const = default;
};

LedgerState genesis_state(const GenesisConfig& config);

// Contract addresses are derived from (deployer, nonce) so replay is
// deterministic.
Address contract_address(const Address& sender, std::uint64_t nonce);

// Chronological record of the contract events a transaction produced; used
// by the audit exporter.
struct AuditEvent {
    std::uint64_t height = 0;
    Digest txid{};
    Address contract;
    std::variant<identity::CertificateIssued, identity::CertificateRevoked,
                 registry::RegisterFileEvent, vulndisc::StatusTransition>
        body;
    std::optional<Digest> disclosure_id;
};

using AuditSink = std::vector<AuditEvent>;

// Validates and executes one transaction against the state: signature,
// nonce, balance, then the payload. The fee moves to `miner`; a transfer
// additionally moves `amount`. On error the state is left unchanged.
std::optional<TxError> apply_transaction(LedgerState& state,
                                         const SignedTransaction& tx,
                                         const GenesisConfig& config,
                                         std::uint64_t height,
                                         const Address& miner,
                                         AuditSink* audit = nullptr);

enum class BlockErrorCode {
    BadParentHash,
    BadProofOfWork,
    BadHeight,
    BadTxRoot,
    BadBlockHash,
    InvalidTransaction,
};

std::string_view to_string(BlockErrorCode code);

struct BlockError {
    BlockErrorCode code;
    std::size_t tx_index = 0;
    std::optional<TxError> tx_error;
    std::string detail;
};

// Full block check against the state at its parent: linkage, proof of work,
// header integrity, then every transaction in order (block reward credited
// to the miner first so fees and reward settle exactly once per block).
std::optional<BlockError> validate_and_apply_block(LedgerState& state,
                                                   const Block& block,
                                                   const Digest& parent_hash,
                                                   std::uint64_t parent_height,
                                                   const GenesisConfig& config,
                                                   AuditSink* audit = nullptr);

struct ReplayError {
    std::uint64_t height = 0;
    BlockError block_error;
};

struct ReplayResult {
    std::optional<LedgerState> state;
    std::optional<ReplayError> error;
};

// Deterministic re-execution: `blocks` are the post-genesis blocks in order.
// The result equals the incrementally maintained state or pinpoints the
// first invalid height.
ReplayResult replay(const GenesisConfig& config, std::span<const Block> blocks,
                    AuditSink* audit = nullptr);

}  // namespace certledger::chain
