// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/node.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_set>

namespace certledger::chain {

std::string_view to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Client: return "client";
        case NodeRole::Observer: return "observer";
        case NodeRole::Validator: return "validator";
    }
    return "client";
}

namespace {

std::int64_t wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

Node::Node(NodeRole role, GenesisConfig config,
           std::optional<KeyPair> miner_keys, Clock clock)
    : role_(role),
      config_(std::move(config)),
      miner_keys_(std::move(miner_keys)),
      clock_(clock ? std::move(clock) : Clock(wall_clock)) {
    Block genesis = config_.genesis_block();
    head_ = genesis.hash;
    head_height_ = 0;
    blocks_.emplace(genesis.hash, std::move(genesis));
    state_ = genesis_state(config_);
}

Address Node::miner_address() const {
    return miner_keys_ ? miner_keys_->address() : Address{};
}

std::uint64_t Node::expected_nonce_locked(const Address& sender) const {
    std::uint64_t queued = 0;
    for (const auto& tx : mempool_) {
        if (tx.sender == sender) ++queued;
    }
    return state_.nonce(sender) + queued;
}

SubmitResult Node::submit(const SignedTransaction& tx) {
    // Only validators keep a mempool; clients and observers hand the
    // transaction to the network's validators.
    if (role_ != NodeRole::Validator) {
        if (network_ != nullptr) {
            return network_->submit(tx);
        }
        return {false, TxError{TxErrorCode::InvalidArgument,
                               "node cannot accept transactions"}};
    }
    std::lock_guard lock(mu_);
    if (!verify_transaction_signature(tx)) {
        return {false, TxError{TxErrorCode::BadSignature,
                               "signature does not verify"}};
    }
    if (tx.nonce != expected_nonce_locked(tx.sender)) {
        return {false,
                TxError{TxErrorCode::BadNonce,
                        "expected nonce " +
                            std::to_string(expected_nonce_locked(tx.sender))}};
    }
    Amount required = tx.fee;
    if (const auto* transfer = std::get_if<Transfer>(&tx.payload)) {
        required += transfer->amount;
    }
    if (required > state_.balance(tx.sender)) {
        return {false, TxError{TxErrorCode::InsufficientBalance,
                               "amount plus fee exceeds balance"}};
    }
    if (const auto* call = std::get_if<CallContract>(&tx.payload)) {
        if (!state_.contracts.contains(call->contract)) {
            return {false, TxError{TxErrorCode::UnknownContract,
                                   "no contract at address"}};
        }
    }
    const Digest id = transaction_id(tx);
    for (const auto& queued : mempool_) {
        if (transaction_id(queued) == id) {
            return {false, TxError{TxErrorCode::BadNonce,
                                   "transaction already queued"}};
        }
    }
    mempool_.push_back(tx);
    return {true, std::nullopt};
}

MineResult Node::build_block() {
    std::lock_guard lock(mu_);
    if (role_ != NodeRole::Validator || !miner_keys_) {
        throw std::logic_error("only validator nodes build blocks");
    }
    Block block;
    block.height = head_height_ + 1;
    block.parent_hash = head_;
    block.miner = miner_keys_->address();
    block.timestamp = clock_();

    // Select mempool transactions valid in order against the head state.
    LedgerState scratch = state_;
    scratch.balances[block.miner] += config_.reward;
    for (const auto& tx : mempool_) {
        LedgerState trial = scratch;
        if (!apply_transaction(trial, tx, config_, block.height, block.miner)) {
            scratch = std::move(trial);
            block.transactions.push_back(tx);
        }
    }
    return mine(std::move(block), config_.difficulty_bits);
}

AppendResult Node::receive_block(const Block& block) {
    std::lock_guard lock(mu_);
    return receive_block_locked(block);
}

AppendResult Node::receive_block_locked(const Block& block) {
    ++blocks_received_;
    if (role_ == NodeRole::Client) {
        return {false, std::nullopt};  // clients do not store blocks
    }
    if (blocks_.contains(block.hash)) {
        return {false, std::nullopt};  // duplicate delivery, nothing to do
    }
    auto parent = blocks_.find(block.parent_hash);
    if (parent == blocks_.end()) {
        return {false, BlockError{BlockErrorCode::BadParentHash, 0, std::nullopt,
                                  "unknown parent block"}};
    }

    // Re-derive the branch state from genesis; forks are shallow at desk
    // scale so replaying beats caching per-tip states.
    std::vector<Block> branch = branch_to_locked(block.parent_hash);
    LedgerState state = genesis_state(config_);
    Digest parent_hash = branch.front().hash;
    std::uint64_t parent_height = 0;
    for (std::size_t i = 1; i < branch.size(); ++i) {
        if (validate_and_apply_block(state, branch[i], parent_hash,
                                     parent_height, config_)) {
            throw std::logic_error("stored branch failed revalidation");
        }
        parent_hash = branch[i].hash;
        parent_height = branch[i].height;
    }
    auto error = validate_and_apply_block(state, block, parent_hash,
                                          parent_height, config_);
    if (error) {
        return {false, error};
    }

    blocks_.emplace(block.hash, block);
    if (block.height > head_height_) {
        head_ = block.hash;
        head_height_ = block.height;
        state_ = std::move(state);

        // Drop mined and no-longer-valid transactions.
        std::unordered_set<Digest, DigestHash> mined;
        for (const auto& tx : block.transactions) {
            mined.insert(transaction_id(tx));
        }
        std::vector<SignedTransaction> keep;
        LedgerState scratch = state_;
        for (const auto& tx : mempool_) {
            if (mined.contains(transaction_id(tx))) continue;
            LedgerState trial = scratch;
            if (!apply_transaction(trial, tx, config_, head_height_ + 1,
                                   miner_address())) {
                scratch = std::move(trial);
                keep.push_back(tx);
            }
        }
        mempool_ = std::move(keep);
    }
    return {true, std::nullopt};
}

MineResult Node::mine_and_announce() {
    MineResult mined = build_block();
    receive_block(mined.block);
    if (network_ != nullptr) {
        network_->broadcast(mined.block, this);
    }
    return mined;
}

std::vector<Block> Node::branch_to_locked(const Digest& tip) const {
    std::vector<Block> branch;
    Digest cursor = tip;
    for (;;) {
        auto it = blocks_.find(cursor);
        if (it == blocks_.end()) {
            throw std::logic_error("broken block tree");
        }
        branch.push_back(it->second);
        if (it->second.height == 0) break;
        cursor = it->second.parent_hash;
    }
    std::reverse(branch.begin(), branch.end());
    return branch;
}

LedgerState Node::state() const {
    std::lock_guard lock(mu_);
    return state_;
}

std::vector<Block> Node::canonical_chain() const {
    std::lock_guard lock(mu_);
    return branch_to_locked(head_);
}

std::uint64_t Node::height() const {
    std::lock_guard lock(mu_);
    return head_height_;
}

Digest Node::head_hash() const {
    std::lock_guard lock(mu_);
    return head_;
}

std::size_t Node::mempool_size() const {
    std::lock_guard lock(mu_);
    return mempool_.size();
}

std::uint64_t Node::blocks_received() const {
    std::lock_guard lock(mu_);
    return blocks_received_;
}

void Network::add_node(std::shared_ptr<Node> node) {
    node->network_ = this;
    nodes_.push_back(std::move(node));
}

SubmitResult Network::submit(const SignedTransaction& tx) {
    SubmitResult result{false,
                        TxError{TxErrorCode::UnknownContract, "no validators"}};
    bool first = true;
    for (const auto& node : nodes_) {
        if (node->role() != NodeRole::Validator) continue;
        SubmitResult r = node->submit(tx);
        if (first) {
            result = r;
            first = false;
        }
    }
    return result;
}

void Network::broadcast(const Block& block, const Node* origin) {
    for (const auto& node : nodes_) {
        if (node.get() == origin) continue;
        if (node->role() == NodeRole::Client) continue;
        node->receive_block(block);
    }
}

std::vector<std::shared_ptr<Node>> Network::full_nodes() const {
    std::vector<std::shared_ptr<Node>> out;
    for (const auto& node : nodes_) {
        if (node->role() != NodeRole::Client) {
            out.push_back(node);
        }
    }
    return out;
}

}  // namespace certledger::chain
