// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "certledger/chain.hpp"

namespace certledger::chain {

enum class NodeRole { Client, Observer, Validator };

std::string_view to_string(NodeRole role);

struct SubmitResult {
    bool accepted = false;
    std::optional<TxError> error;
};

struct AppendResult {
    bool appended = false;
    std::optional<BlockError> error;
};

class Network;

// One simulated node. All state transitions go through a single internal
// writer lock; readers get value snapshots. Full nodes (observers and
// validators) keep the whole block tree and follow the longest valid chain;
// clients only originate transactions.
class Node {
  public:
    using Clock = std::function<std::int64_t()>;

    Node(NodeRole role, GenesisConfig config,
         std::optional<KeyPair> miner_keys = std::nullopt,
         Clock clock = nullptr);

    NodeRole role() const { return role_; }
    const GenesisConfig& config() const { return config_; }
    Address miner_address() const;

    // Mempool admission: signature, expected nonce (queued transactions
    // included), balance, known call target.
    SubmitResult submit(const SignedTransaction& tx);

    // Assembles and mines the next block from the mempool. Transactions that
    // turned invalid against the head state are dropped, not included.
    // Validator role only; the block is neither appended nor broadcast here.
    MineResult build_block();

    // Validates a block against its parent and adopts it. A block extending
    // a side branch is stored; the head moves only when that branch becomes
    // strictly longer (longest-valid-chain rule).
    AppendResult receive_block(const Block& block);

    // Mines, self-appends and broadcasts in one step.
    MineResult mine_and_announce();

    LedgerState state() const;
    std::vector<Block> canonical_chain() const;  // genesis first
    std::uint64_t height() const;
    Digest head_hash() const;
    std::size_t mempool_size() const;
    std::uint64_t blocks_received() const;

  private:
    friend class Network;

    AppendResult receive_block_locked(const Block& block);
    std::vector<Block> branch_to_locked(const Digest& tip) const;
    std::uint64_t expected_nonce_locked(const Address& sender) const;

    NodeRole role_;
    GenesisConfig config_;
    std::optional<KeyPair> miner_keys_;
    Clock clock_;
    Network* network_ = nullptr;

    mutable std::mutex mu_;
    std::unordered_map<Digest, Block, DigestHash> blocks_;
    Digest head_;
    std::uint64_t head_height_ = 0;
    LedgerState state_;
    std::vector<SignedTransaction> mempool_;
    std::uint64_t blocks_received_ = 0;
};

// Lossless in-process network: transactions reach every validator, blocks
// reach every full node except the origin, exactly once per broadcast.
class Network {
  public:
    void add_node(std::shared_ptr<Node> node);

    SubmitResult submit(const SignedTransaction& tx);
    void broadcast(const Block& block, const Node* origin);

    std::vector<std::shared_ptr<Node>> full_nodes() const;

  private:
    std::vector<std::shared_ptr<Node>> nodes_;
};

}  // namespace certledger::chain
