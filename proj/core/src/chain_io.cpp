// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/chain_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace certledger::chain {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json ordered(
    std::initializer_list<std::pair<const char*, ordered_json>> fields) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, value] : fields) {
        j[key] = value;
    }
    return j;
}

Address require_address(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw IoError(std::string("missing address field: ") + key);
    }
    auto a = address_from_hex(j[key].get<std::string>());
    if (!a) throw IoError(std::string("bad address in field: ") + key);
    return *a;
}

Digest require_digest(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw IoError(std::string("missing digest field: ") + key);
    }
    auto d = digest_from_hex(j[key].get<std::string>());
    if (!d) throw IoError(std::string("bad digest in field: ") + key);
    return *d;
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw IoError(std::string("missing string field: ") + key);
    }
    return j[key].get<std::string>();
}

std::uint64_t require_u64(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned()) {
        throw IoError(std::string("missing unsigned field: ") + key);
    }
    return j[key].get<std::uint64_t>();
}

ordered_json call_to_json(const ContractCall& call) {
    if (const auto* auth = std::get_if<identity::AuthorityCall>(&call)) {
        if (const auto* issue = std::get_if<identity::IssueCertificate>(auth)) {
            return ordered({{"function", "issue-certificate"},
                            {"subject-name", issue->subject_name},
                            {"subject-certificate", issue->subject_certificate}});
        }
        const auto& revoke = std::get<identity::RevokeCertificate>(*auth);
        return ordered({{"function", "revoke-certificate"},
                        {"subject-name", revoke.subject_name}});
    }
    const auto& reg = std::get<registry::RegistryCall>(call);
    if (const auto* set_body = std::get_if<registry::SetAssessmentBody>(&reg)) {
        return ordered({{"function", "set-assessment-body"},
                        {"body", to_hex(set_body->body)},
                        {"body-name", set_body->body_name},
                        {"body-id-contract", to_hex(set_body->body_id_contract)}});
    }
    if (const auto* file = std::get_if<registry::RegisterFile>(&reg)) {
        return ordered(
            {{"function", "register-file"},
             {"file-type", file->file_type},
             {"file-location", file->file_location},
             {"file-hash", to_hex(std::span<const std::uint8_t>(file->file_hash))}});
    }
    if (const auto* disclose = std::get_if<registry::Disclose>(&reg)) {
        return ordered({{"function", "disclose"},
                        {"ciphertext-location", disclose->ciphertext_location},
                        {"ciphertext-hash", to_hex(disclose->ciphertext_hash)}});
    }
    if (const auto* update = std::get_if<registry::UpdateDisclosure>(&reg)) {
        return ordered(
            {{"function", "update-disclosure"},
             {"id", to_hex(update->id)},
             {"status", std::string(vulndisc::to_string(update->target))}});
    }
    const auto& publish = std::get<registry::PublishDisclosure>(reg);
    return ordered(
        {{"function", "publish-disclosure"}, {"id", to_hex(publish.id)}});
}

ContractCall call_from_json(const json& j) {
    const std::string function = require_string(j, "function");
    if (function == "issue-certificate") {
        return identity::AuthorityCall{identity::IssueCertificate{
            require_string(j, "subject-name"),
            require_string(j, "subject-certificate")}};
    }
    if (function == "revoke-certificate") {
        return identity::AuthorityCall{
            identity::RevokeCertificate{require_string(j, "subject-name")}};
    }
    if (function == "set-assessment-body") {
        return registry::RegistryCall{registry::SetAssessmentBody{
            require_address(j, "body"), require_string(j, "body-name"),
            require_address(j, "body-id-contract")}};
    }
    if (function == "register-file") {
        auto hash = bytes_from_hex(require_string(j, "file-hash"));
        if (!hash) throw IoError("bad file-hash hex");
        return registry::RegistryCall{
            registry::RegisterFile{require_string(j, "file-type"),
                                   require_string(j, "file-location"), *hash}};
    }
    if (function == "disclose") {
        return registry::RegistryCall{
            registry::Disclose{require_string(j, "ciphertext-location"),
                               require_digest(j, "ciphertext-hash")}};
    }
    if (function == "update-disclosure") {
        auto status = vulndisc::status_from_string(require_string(j, "status"));
        if (!status) throw IoError("bad disclosure status");
        return registry::RegistryCall{
            registry::UpdateDisclosure{require_digest(j, "id"), *status}};
    }
    if (function == "publish-disclosure") {
        return registry::RegistryCall{
            registry::PublishDisclosure{require_digest(j, "id")}};
    }
    throw IoError("unknown contract function: " + function);
}

ordered_json payload_to_json(const Payload& payload) {
    if (const auto* transfer = std::get_if<Transfer>(&payload)) {
        return ordered({{"type", "transfer"},
                        {"to", to_hex(transfer->to)},
                        {"amount", transfer->amount}});
    }
    if (const auto* deploy = std::get_if<DeployAuthority>(&payload)) {
        return ordered({{"type", "deploy-authority"},
                        {"owner-name", deploy->init.owner_name},
                        {"owner-certificate", deploy->init.owner_certificate}});
    }
    if (const auto* deploy = std::get_if<DeployRegistry>(&payload)) {
        return ordered(
            {{"type", "deploy-registry"},
             {"manufacturer-name", deploy->init.manufacturer_name},
             {"manufacturer-id-contract",
              to_hex(deploy->init.manufacturer_id_contract)},
             {"device-id", deploy->init.device_id}});
    }
    const auto& call = std::get<CallContract>(payload);
    ordered_json j = ordered({{"type", "call"}, {"contract", to_hex(call.contract)}});
    j.update(call_to_json(call.call));
    return j;
}

Payload payload_from_json(const json& j) {
    const std::string type = require_string(j, "type");
    if (type == "transfer") {
        return Transfer{require_address(j, "to"), require_u64(j, "amount")};
    }
    if (type == "deploy-authority") {
        return DeployAuthority{
            identity::AuthorityInit{require_string(j, "owner-name"),
                                    require_string(j, "owner-certificate")}};
    }
    if (type == "deploy-registry") {
        return DeployRegistry{registry::RegistryInit{
            require_string(j, "manufacturer-name"),
            require_address(j, "manufacturer-id-contract"),
            require_string(j, "device-id")}};
    }
    if (type == "call") {
        return CallContract{require_address(j, "contract"), call_from_json(j)};
    }
    throw IoError("unknown payload type: " + type);
}

ordered_json transaction_to_json_obj(const SignedTransaction& tx) {
    return ordered({{"sender", to_hex(tx.sender)},
                    {"public-key", to_hex(tx.sender_key)},
                    {"nonce", tx.nonce},
                    {"fee", tx.fee},
                    {"payload", payload_to_json(tx.payload)},
                    {"signature", to_hex(tx.signature)}});
}

SignedTransaction transaction_from_json_obj(const json& j) {
    SignedTransaction tx;
    tx.sender = require_address(j, "sender");
    auto key = public_key_from_hex(require_string(j, "public-key"));
    if (!key) throw IoError("bad public-key");
    tx.sender_key = *key;
    tx.nonce = require_u64(j, "nonce");
    tx.fee = require_u64(j, "fee");
    if (!j.contains("payload") || !j["payload"].is_object()) {
        throw IoError("missing payload");
    }
    tx.payload = payload_from_json(j["payload"]);
    auto sig = signature_from_hex(require_string(j, "signature"));
    if (!sig) throw IoError("bad signature hex");
    tx.signature = *sig;
    return tx;
}

ordered_json block_to_json_obj(const Block& block) {
    ordered_json txs = ordered_json::array();
    for (const auto& tx : block.transactions) {
        txs.push_back(transaction_to_json_obj(tx));
    }
    return ordered({{"height", block.height},
                    {"parent-hash", to_hex(block.parent_hash)},
                    {"miner", to_hex(block.miner)},
                    {"nonce", block.nonce},
                    {"timestamp", block.timestamp},
                    {"tx-root", to_hex(block.tx_root)},
                    {"transactions", txs},
                    {"hash", to_hex(block.hash)}});
}

Block block_from_json_obj(const json& j) {
    Block block;
    block.height = require_u64(j, "height");
    block.parent_hash = require_digest(j, "parent-hash");
    block.miner = require_address(j, "miner");
    block.nonce = require_u64(j, "nonce");
    if (!j.contains("timestamp") || !j["timestamp"].is_number_integer()) {
        throw IoError("missing timestamp");
    }
    block.timestamp = j["timestamp"].get<std::int64_t>();
    block.tx_root = require_digest(j, "tx-root");
    if (!j.contains("transactions") || !j["transactions"].is_array()) {
        throw IoError("missing transactions");
    }
    for (const auto& tx : j["transactions"]) {
        block.transactions.push_back(transaction_from_json_obj(tx));
    }
    block.hash = require_digest(j, "hash");
    return block;
}

}  // namespace

std::string genesis_to_json(const GenesisConfig& config) {
    ordered_json allocations = ordered_json::array();
    for (const auto& [address, amount] : config.allocations) {
        allocations.push_back(
            ordered({{"address", to_hex(address)}, {"amount", amount}}));
    }
    ordered_json validators = ordered_json::array();
    for (const auto& v : config.validators) {
        validators.push_back(to_hex(v));
    }
    return ordered({{"difficulty-bits", config.difficulty_bits},
                    {"reward", config.reward},
                    {"fee", config.fee},
                    {"allocations", allocations},
                    {"validators", validators},
                    {"embargo-blocks", config.embargo_blocks}})
        .dump(2);
}

GenesisConfig genesis_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) throw IoError("genesis config is not a JSON object");
    GenesisConfig config;
    config.difficulty_bits =
        static_cast<unsigned>(require_u64(j, "difficulty-bits"));
    if (config.difficulty_bits > 255) throw IoError("difficulty out of range");
    config.reward = require_u64(j, "reward");
    config.fee = require_u64(j, "fee");
    if (!j.contains("allocations") || !j["allocations"].is_array()) {
        throw IoError("missing allocations");
    }
    for (const auto& entry : j["allocations"]) {
        config.allocations.emplace_back(require_address(entry, "address"),
                                        require_u64(entry, "amount"));
    }
    if (!j.contains("validators") || !j["validators"].is_array()) {
        throw IoError("missing validators");
    }
    for (const auto& entry : j["validators"]) {
        if (!entry.is_string()) throw IoError("bad validator entry");
        auto a = address_from_hex(entry.get<std::string>());
        if (!a) throw IoError("bad validator address");
        config.validators.push_back(*a);
    }
    if (j.contains("embargo-blocks")) {
        config.embargo_blocks = require_u64(j, "embargo-blocks");
    }
    if (config.embargo_blocks == 0) throw IoError("embargo-blocks must be > 0");
    return config;
}

std::string block_to_json(const Block& block) {
    return block_to_json_obj(block).dump();
}

Block block_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) throw IoError("block is not a JSON object");
    return block_from_json_obj(j);
}

std::string transaction_to_json(const SignedTransaction& tx) {
    return transaction_to_json_obj(tx).dump();
}

SignedTransaction transaction_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) throw IoError("transaction is not a JSON object");
    return transaction_from_json_obj(j);
}

void save_genesis(const std::filesystem::path& path,
                  const GenesisConfig& config) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << genesis_to_json(config) << "\n";
}

GenesisConfig load_genesis(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return genesis_from_json(buffer.str());
}

void save_chain(const std::filesystem::path& path,
                const std::vector<Block>& blocks) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& block : blocks) {
        out << block_to_json(block) << "\n";
    }
}

std::vector<Block> load_chain(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<Block> blocks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            blocks.push_back(block_from_json(line));
        } catch (const IoError& e) {
            // Blocks are one per line, genesis first, so the failing height
            // is the line number minus one.
            throw IoError("height " + std::to_string(line_no - 1) + " (line " +
                          std::to_string(line_no) + "): " + e.what());
        }
    }
    return blocks;
}

LedgerState replay_chain_file(const GenesisConfig& config,
                              const std::vector<Block>& blocks,
                              AuditSink* audit) {
    if (blocks.empty()) {
        throw IoError("chain file has no genesis block");
    }
    const Block expected_genesis = config.genesis_block();
    if (blocks.front() != expected_genesis) {
        throw IoError("height 0: genesis block does not match configuration");
    }
    auto result = replay(config,
                         std::span<const Block>(blocks.data() + 1,
                                                blocks.size() - 1),
                         audit);
    if (result.error) {
        throw IoError("height " + std::to_string(result.error->height) + ": " +
                      std::string(to_string(result.error->block_error.code)));
    }
    return std::move(*result.state);
}

}  // namespace certledger::chain
