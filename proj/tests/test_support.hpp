// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "certledger/chain.hpp"
#include "certledger/node.hpp"

namespace certledger::test {

inline KeyPair test_keys(int n) {
    return keypair_from_seed(sha256("certledger-test-key-" + std::to_string(n)));
}

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(CERTLEDGER_FIXTURE_DIR) / name;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

inline std::string read_text(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

// One validator + one observer wired through a lossless network, with every
// funded key given `fund` units. Logical clock so runs are reproducible.
struct Harness {
    chain::GenesisConfig genesis;
    KeyPair validator_keys = test_keys(1000);
    chain::Network network;
    std::shared_ptr<chain::Node> validator;
    std::shared_ptr<chain::Node> observer;
    std::int64_t now = 1'558'000'000;

    explicit Harness(const std::vector<KeyPair>& funded,
                     chain::Amount fund = 1000, unsigned difficulty = 8,
                     std::uint64_t embargo_blocks = 144) {
        genesis.difficulty_bits = difficulty;
        genesis.embargo_blocks = embargo_blocks;
        for (const auto& kp : funded) {
            genesis.allocations.emplace_back(kp.address(), fund);
        }
        genesis.validators.push_back(validator_keys.address());
        auto clock = [this] { return now; };
        validator = std::make_shared<chain::Node>(chain::NodeRole::Validator,
                                                  genesis, validator_keys, clock);
        observer = std::make_shared<chain::Node>(chain::NodeRole::Observer,
                                                 genesis, std::nullopt, clock);
        network.add_node(validator);
        network.add_node(observer);
    }

    struct TxResult {
        bool ok = false;
        std::optional<TxError> error;
        std::uint64_t height = 0;
    };

    // Validates against the exact landing height first, then submits and
    // mines one block; a rejected transaction leaves the chain untouched.
    TxResult apply(const KeyPair& sender, chain::Payload payload) {
        const std::uint64_t nonce = validator->state().nonce(sender.address());
        auto tx = chain::make_transaction(sender, std::move(payload), nonce,
                                          genesis.fee);
        chain::LedgerState probe = validator->state();
        auto error = chain::apply_transaction(probe, tx, genesis,
                                              validator->height() + 1,
                                              validator_keys.address());
        if (error) {
            return {false, error, 0};
        }
        auto submitted = validator->submit(tx);
        if (!submitted.accepted) {
            return {false, submitted.error, 0};
        }
        const Digest id = chain::transaction_id(tx);
        auto mined = validator->mine_and_announce();
        for (const auto& included : mined.block.transactions) {
            if (chain::transaction_id(included) == id) {
                return {true, std::nullopt, mined.block.height};
            }
        }
        return {false,
                TxError{TxErrorCode::InvalidArgument, "dropped at build"},
                mined.block.height};
    }

    // Deploys and returns the new contract address (fails the caller's
    // REQUIRE if rejected via the .ok flag).
    Address deploy_authority(const KeyPair& sender, const std::string& name,
                             const std::string& cert = "") {
        const std::uint64_t nonce = validator->state().nonce(sender.address());
        Address addr = chain::contract_address(sender.address(), nonce);
        apply(sender, chain::DeployAuthority{{name, cert}});
        return addr;
    }

    Address deploy_registry(const KeyPair& sender, const std::string& mfg_name,
                            const Address& id_contract,
                            const std::string& device_id) {
        const std::uint64_t nonce = validator->state().nonce(sender.address());
        Address addr = chain::contract_address(sender.address(), nonce);
        apply(sender, chain::DeployRegistry{{mfg_name, id_contract, device_id}});
        return addr;
    }

    TxResult call(const KeyPair& sender, const Address& contract,
                  chain::ContractCall contract_call) {
        return apply(sender,
                     chain::CallContract{contract, std::move(contract_call)});
    }

    chain::LedgerState state() const { return validator->state(); }
};

}  // namespace certledger::test
