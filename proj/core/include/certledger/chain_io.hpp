// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "certledger/chain.hpp"

namespace certledger::chain {

// External formats. Hashes and addresses are lowercase 0x-prefixed hex; a
// chain file is newline-delimited JSON with one block per line, genesis
// first.

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string genesis_to_json(const GenesisConfig& config);
GenesisConfig genesis_from_json(const std::string& text);

std::string block_to_json(const Block& block);
Block block_from_json(const std::string& text);

std::string transaction_to_json(const SignedTransaction& tx);
SignedTransaction transaction_from_json(const std::string& text);

void save_genesis(const std::filesystem::path& path, const GenesisConfig&);
GenesisConfig load_genesis(const std::filesystem::path& path);

// Writes genesis + blocks; `blocks` must start with the genesis block.
void save_chain(const std::filesystem::path& path,
                const std::vector<Block>& blocks);
std::vector<Block> load_chain(const std::filesystem::path& path);

// Validates a loaded chain against the config (genesis binding included) and
// returns the replayed state. Throws IoError with the failing height on a
// corrupt chain.
LedgerState replay_chain_file(const GenesisConfig& config,
                              const std::vector<Block>& blocks,
                              AuditSink* audit = nullptr);

}  // namespace certledger::chain
