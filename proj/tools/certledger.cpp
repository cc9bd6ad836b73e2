// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
//
// certledger -- command-line front end for the certification ledger:
// key management, chain maintenance, identity/registry contracts, the
// off-chain store, the MUD toolchain, the simulated SDN controller,
// vulnerability disclosure, scripted scenarios and audit export.
//
// Conventions: results are single JSON objects (or JSON lines for logs) on
// stdout; domain failures print {"error":{...}} and exit 1; usage errors
// exit 2.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "certledger/audit.hpp"
#include "certledger/chain_io.hpp"
#include "certledger/controller.hpp"
#include "certledger/identity.hpp"
#include "certledger/mud.hpp"
#include "certledger/node.hpp"
#include "certledger/registry.hpp"
#include "certledger/scenario.hpp"
#include "certledger/store.hpp"
#include "certledger/vulndisc.hpp"

namespace {

using namespace certledger;
using nlohmann::json;
using nlohmann::ordered_json;

class CommandError : public std::runtime_error {
  public:
    CommandError(std::string code, const std::string& detail)
        : std::runtime_error(detail), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

[[noreturn]] void fail(std::string code, const std::string& detail) {
    throw CommandError(std::move(code), detail);
}

std::vector<std::uint8_t> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot read " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

std::string read_text(const std::string& path) {
    auto bytes = read_binary(path);
    return std::string(bytes.begin(), bytes.end());
}

std::int64_t wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// ---------------------------------------------------------------------------
// Wallet: named keypairs in a plain JSON file.

struct Wallet {
    std::map<std::string, KeyPair> keys;

    static Wallet load(const std::string& path) {
        Wallet w;
        std::ifstream in(path);
        if (!in) return w;  // a missing wallet is empty
        json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
        if (!j.is_object()) fail("IoError", "wallet file is not a JSON object");
        for (const auto& [name, entry] : j.items()) {
            auto pk = public_key_from_hex(entry.value("public-key", ""));
            auto sk = private_key_from_hex(entry.value("private-key", ""));
            if (!pk || !sk) fail("IoError", "bad wallet entry: " + name);
            w.keys.emplace(name, KeyPair{*pk, *sk});
        }
        return w;
    }

    void save(const std::string& path) const {
        ordered_json j = ordered_json::object();
        for (const auto& [name, kp] : keys) {
            j[name] = {{"address", to_hex(kp.address())},
                       {"public-key", to_hex(kp.public_key)},
                       {"private-key", to_hex(kp.private_key)}};
        }
        std::ofstream out(path, std::ios::trunc);
        if (!out) fail("IoError", "cannot write " + path);
        out << j.dump(2) << "\n";
    }

    const KeyPair& get(const std::string& name) const {
        auto it = keys.find(name);
        if (it == keys.end()) fail("UnknownKey", "no key named " + name);
        return it->second;
    }

    // Name from the wallet, or a literal hex address.
    Address resolve(const std::string& ref) const {
        if (ref.starts_with("0x")) {
            auto a = address_from_hex(ref);
            if (!a) fail("BadAddress", "malformed address " + ref);
            return *a;
        }
        return get(ref).address();
    }
};

// ---------------------------------------------------------------------------
// Loaded chain context for one-shot commands.

struct ChainCtx {
    chain::GenesisConfig genesis;
    std::vector<chain::Block> blocks;
    chain::LedgerState state;

    static ChainCtx load(const std::string& genesis_path,
                         const std::string& chain_path) {
        ChainCtx ctx;
        ctx.genesis = chain::load_genesis(genesis_path);
        ctx.blocks = chain::load_chain(chain_path);
        ctx.state = chain::replay_chain_file(ctx.genesis, ctx.blocks);
        return ctx;
    }

    // Applies one transaction by mining a single-transaction block; the
    // sender doubles as the block's miner.
    ordered_json apply_and_save(const std::string& chain_path,
                                const KeyPair& sender,
                                chain::Payload payload) {
        const std::uint64_t nonce = state.nonce(sender.address());
        auto tx = chain::make_transaction(sender, std::move(payload), nonce,
                                          genesis.fee);

        chain::Block block;
        block.height = blocks.back().height + 1;
        block.parent_hash = blocks.back().hash;
        block.miner = sender.address();
        block.timestamp = wall_clock();
        block.transactions.push_back(tx);

        // Probe before mining so rejected calls surface their exact reason.
        chain::LedgerState probe = state;
        auto error = chain::apply_transaction(probe, tx, genesis, block.height,
                                              block.miner);
        if (error) {
            fail(std::string(to_string(error->code)), error->detail);
        }

        auto mined = chain::mine(std::move(block), genesis.difficulty_bits);
        auto block_error = chain::validate_and_apply_block(
            state, mined.block, blocks.back().hash, blocks.back().height,
            genesis);
        if (block_error) {
            fail(std::string(to_string(block_error->code)),
                 block_error->detail);
        }
        blocks.push_back(mined.block);
        chain::save_chain(chain_path, blocks);

        ordered_json out;
        out["tx"] = to_hex(chain::transaction_id(tx));
        out["block"] = mined.block.height;
        out["block-hash"] = to_hex(mined.block.hash);
        return out;
    }
};

void print(const ordered_json& j) { std::cout << j.dump() << "\n"; }

Digest seed_digest(const std::string& seed) {
    return sha256("certledger.seed.v1|" + seed);
}

identity::IdentityChain load_chain_path_spec(const ChainCtx& ctx,
                                             const json& spec) {
    if (!spec.is_array()) fail("BadPath", "identity path must be a JSON array");
    identity::IdentityChain chain_path;
    for (const auto& entry : spec) {
        identity::ChainLink link;
        auto a = address_from_hex(entry.value("authority", ""));
        if (!a) fail("BadPath", "bad authority address in path");
        link.authority = *a;
        const std::string subject = entry.value("subject-name", "");
        if (const auto* auth = ctx.state.authority(link.authority)) {
            if (const auto* event = identity::latest_issued(*auth, subject)) {
                link.event = *event;
            } else {
                link.event.subject_name = subject;
            }
        } else {
            link.event.subject_name = subject;
        }
        chain_path.links.push_back(std::move(link));
    }
    return chain_path;
}

// ---------------------------------------------------------------------------
// controller run: onboard devices listed in a scenario file against an
// existing chain + store, then evaluate flows.

int run_controller(const std::string& scenario_path,
                   const std::string& genesis_path,
                   const std::string& chain_path,
                   const std::string& store_path, const Wallet& wallet) {
    json spec = json::parse(read_text(scenario_path), nullptr, false);
    if (!spec.is_object()) fail("BadScenario", "scenario is not a JSON object");

    auto genesis = chain::load_genesis(genesis_path);
    auto blocks = chain::load_chain(chain_path);
    chain::replay_chain_file(genesis, blocks);  // integrity gate

    auto observer =
        std::make_shared<chain::Node>(chain::NodeRole::Observer, genesis);
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        auto r = observer->receive_block(blocks[i]);
        if (!r.appended) fail("BadChain", "chain rejected by observer node");
    }

    store::ContentStore store(store_path);
    auto root = address_from_hex(spec.value("trusted-root", ""));
    if (!root) fail("BadScenario", "missing trusted-root");
    controller::Controller ctl(*root, observer, store);

    mud::Inventory inventory;
    for (const auto& entry : spec.value("inventory", json::array())) {
        auto a = address_from_hex(entry.value("address", ""));
        if (!a) fail("BadScenario", "bad inventory address");
        inventory[*a] = entry.value("mfg-name", "");
    }
    ctl.set_inventory(std::move(inventory));

    ChainCtx ctx{genesis, blocks, observer->state()};
    std::map<std::string, Address> devices;
    bool all_ok = true;

    for (const auto& dev : spec.value("devices", json::array())) {
        const std::string name = dev.value("name", "");
        const KeyPair& keys = wallet.get(dev.value("key", name));
        devices[name] = keys.address();

        ordered_json line;
        line["device"] = name;
        line["address"] = to_hex(keys.address());

        // Authenticate with the on-chain credential, then onboard.
        auto cred_auth = address_from_hex(dev.value("credential-authority", ""));
        const auto* auth = cred_auth ? ctx.state.authority(*cred_auth) : nullptr;
        const auto* event =
            auth ? identity::latest_issued(
                       *auth, dev.value("credential-subject-name", ""))
                 : nullptr;
        if (event == nullptr) {
            line["result"] = "error";
            line["error"] = "no on-chain credential";
            all_ok = false;
            print(line);
            continue;
        }
        auto challenge = ctl.issue_challenge();
        auto proof = controller::make_auth_proof(keys, dev.value("device-id", ""),
                                                 event->subject_certificate,
                                                 challenge);
        auto authd = ctl.authenticate(proof);
        if (!authd.authenticated) {
            line["result"] = "rejected";
            line["reason"] = std::string(to_string(*authd.failure));
            all_ok = false;
            print(line);
            continue;
        }

        controller::OnboardRequest request;
        request.device = keys.address();
        request.device_id = dev.value("device-id", "");
        auto reg = address_from_hex(dev.value("registry", ""));
        if (!reg) fail("BadScenario", "bad registry address");
        request.registry_contract = *reg;
        request.identity_chain =
            load_chain_path_spec(ctx, dev.value("identity-chain", json::array()));

        auto result = ctl.onboard(request);
        line["result"] = std::string(to_string(result.status));
        line["installed-rules"] = result.installed_rules;
        if (result.error) {
            line["error"] = std::string(to_string(result.error->kind));
            line["detail"] = result.error->detail;
            all_ok = false;
        }
        print(line);
    }

    auto resolve = [&](const std::string& ref) -> Address {
        auto it = devices.find(ref);
        if (it != devices.end()) return it->second;
        return wallet.resolve(ref);
    };

    for (const auto& f : spec.value("flows", json::array())) {
        controller::PacketFlow flow;
        flow.src = resolve(f.value("src", ""));
        flow.dst = resolve(f.value("dst", ""));
        flow.protocol = f.value("protocol", 0);
        flow.src_port = f.value("src-port", 0);
        flow.dst_port = f.value("dst-port", 0);
        auto decision = ctl.filter_flow(resolve(f.value("device", "")), flow);

        ordered_json line;
        line["flow"] = {{"src", to_hex(flow.src)},
                        {"dst", to_hex(flow.dst)},
                        {"protocol", flow.protocol},
                        {"src-port", flow.src_port},
                        {"dst-port", flow.dst_port}};
        line["decision"] = decision.allow ? "allow" : "deny";
        if (decision.allow) {
            line["matched-rule"] = decision.matched_rule;
        } else {
            line["reason"] = decision.reason;
        }
        print(line);
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certledger: blockchain-backed certification tracking for "
                 "IoT devices"};
    app.require_subcommand(1);

    std::string genesis_path, chain_path, keys_path, store_path;
    auto add_genesis = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--genesis", genesis_path,
                                    "genesis configuration JSON")
                        ->envname("CERTLEDGER_GENESIS");
        if (required) opt->required();
    };
    auto add_chain = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--chain", chain_path,
                                    "chain file (NDJSON, one block per line)")
                        ->envname("CERTLEDGER_CHAIN");
        if (required) opt->required();
    };
    auto add_keys = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--keys", keys_path, "wallet JSON file")
                        ->envname("CERTLEDGER_KEYS");
        if (required) opt->required();
    };
    auto add_store = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--store", store_path,
                                    "off-chain store directory")
                        ->envname("CERTLEDGER_STORE");
        if (required) opt->required();
    };

    int exit_code = 0;
    auto run = [&](auto&& fn) {
        return [&, fn]() {
            try {
                exit_code = fn();
            } catch (const CommandError& e) {
                ordered_json err;
                err["error"] = {{"code", e.code()}, {"detail", e.what()}};
                print(err);
                exit_code = 1;
            } catch (const chain::IoError& e) {
                ordered_json err;
                err["error"] = {{"code", "ChainError"}, {"detail", e.what()}};
                print(err);
                exit_code = 1;
            } catch (const std::exception& e) {
                ordered_json err;
                err["error"] = {{"code", "Error"}, {"detail", e.what()}};
                print(err);
                exit_code = 1;
            }
        };
    };

    // -------------------------------------------------------- keygen
    {
        auto* cmd = app.add_subcommand("keygen", "generate a named keypair");
        add_keys(cmd);
        auto name = std::make_shared<std::string>();
        auto seed = std::make_shared<std::string>();
        cmd->add_option("--name", *name, "key name")->required();
        cmd->add_option("--seed", *seed, "deterministic seed string");
        cmd->callback(run([&, name, seed]() {
            Wallet wallet = Wallet::load(keys_path);
            if (wallet.keys.contains(*name)) {
                fail("DuplicateKey", "key already exists: " + *name);
            }
            KeyPair kp = seed->empty()
                             ? generate_keypair()
                             : keypair_from_seed(
                                   seed_digest(*seed + "|" + *name));
            wallet.keys.emplace(*name, kp);
            wallet.save(keys_path);
            ordered_json out;
            out["name"] = *name;
            out["address"] = to_hex(kp.address());
            out["public-key"] = to_hex(kp.public_key);
            print(out);
            return 0;
        }));
    }

    // -------------------------------------------------------- chain
    {
        auto* cmd = app.add_subcommand("chain", "ledger maintenance");
        cmd->require_subcommand(1);

        auto* genesis_cmd =
            cmd->add_subcommand("genesis", "write a genesis configuration");
        add_keys(genesis_cmd, false);
        auto out_path = std::make_shared<std::string>();
        auto difficulty = std::make_shared<unsigned>(8);
        auto reward = std::make_shared<std::uint64_t>(2);
        auto fee = std::make_shared<std::uint64_t>(1);
        auto embargo = std::make_shared<std::uint64_t>(144);
        auto allocations = std::make_shared<std::vector<std::string>>();
        auto validators = std::make_shared<std::vector<std::string>>();
        genesis_cmd->add_option("--out", *out_path)->required();
        genesis_cmd->add_option("--difficulty-bits", *difficulty);
        genesis_cmd->add_option("--reward", *reward);
        genesis_cmd->add_option("--fee", *fee);
        genesis_cmd->add_option("--embargo-blocks", *embargo);
        genesis_cmd->add_option("--allocate", *allocations,
                                "name-or-address=amount (repeatable)");
        genesis_cmd->add_option("--validator", *validators,
                                "validator name or address (repeatable)");
        genesis_cmd->callback(run([&, out_path, difficulty, reward, fee,
                                   embargo, allocations, validators]() {
            Wallet wallet = Wallet::load(keys_path);
            chain::GenesisConfig config;
            config.difficulty_bits = *difficulty;
            config.reward = *reward;
            config.fee = *fee;
            config.embargo_blocks = *embargo;
            for (const auto& spec : *allocations) {
                auto eq = spec.find('=');
                if (eq == std::string::npos) {
                    fail("BadAllocation", "expected name=amount: " + spec);
                }
                config.allocations.emplace_back(
                    wallet.resolve(spec.substr(0, eq)),
                    std::stoull(spec.substr(eq + 1)));
            }
            for (const auto& v : *validators) {
                config.validators.push_back(wallet.resolve(v));
            }
            chain::save_genesis(out_path->c_str(), config);
            print(ordered_json{{"genesis", *out_path},
                               {"digest", to_hex(config.digest())}});
            return 0;
        }));

        auto* init_cmd = cmd->add_subcommand("init", "write the genesis block");
        add_genesis(init_cmd);
        add_chain(init_cmd);
        init_cmd->callback(run([&]() {
            auto genesis = chain::load_genesis(genesis_path);
            chain::save_chain(chain_path, {genesis.genesis_block()});
            print(ordered_json{
                {"chain", chain_path},
                {"genesis-hash", to_hex(genesis.genesis_block().hash)}});
            return 0;
        }));

        auto* validate_cmd =
            cmd->add_subcommand("validate", "revalidate a chain file");
        add_genesis(validate_cmd);
        add_chain(validate_cmd);
        validate_cmd->callback(run([&]() {
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            print(ordered_json{
                {"ok", true},
                {"height", ctx.blocks.back().height},
                {"head", to_hex(ctx.blocks.back().hash)},
                {"total-balance", ctx.state.total_balance()}});
            return 0;
        }));

        auto* mine_cmd = cmd->add_subcommand("mine", "mine empty blocks");
        add_genesis(mine_cmd);
        add_chain(mine_cmd);
        add_keys(mine_cmd);
        auto miner = std::make_shared<std::string>();
        auto count = std::make_shared<int>(1);
        mine_cmd->add_option("--miner", *miner)->required();
        mine_cmd->add_option("--count", *count);
        mine_cmd->callback(run([&, miner, count]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            const Address miner_address = wallet.resolve(*miner);
            for (int i = 0; i < *count; ++i) {
                chain::Block block;
                block.height = ctx.blocks.back().height + 1;
                block.parent_hash = ctx.blocks.back().hash;
                block.miner = miner_address;
                block.timestamp = wall_clock();
                auto mined =
                    chain::mine(std::move(block), ctx.genesis.difficulty_bits);
                auto error = chain::validate_and_apply_block(
                    ctx.state, mined.block, ctx.blocks.back().hash,
                    ctx.blocks.back().height, ctx.genesis);
                if (error) fail("MineError", std::string(to_string(error->code)));
                ctx.blocks.push_back(mined.block);
            }
            chain::save_chain(chain_path, ctx.blocks);
            print(ordered_json{{"height", ctx.blocks.back().height},
                               {"head", to_hex(ctx.blocks.back().hash)}});
            return 0;
        }));

        auto* balance_cmd = cmd->add_subcommand("balance", "account state");
        add_genesis(balance_cmd);
        add_chain(balance_cmd);
        add_keys(balance_cmd, false);
        auto who = std::make_shared<std::string>();
        balance_cmd->add_option("--address", *who, "name or hex address")
            ->required();
        balance_cmd->callback(run([&, who]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            const Address address = wallet.resolve(*who);
            print(ordered_json{{"address", to_hex(address)},
                               {"balance", ctx.state.balance(address)},
                               {"nonce", ctx.state.nonce(address)}});
            return 0;
        }));

        auto* transfer_cmd = cmd->add_subcommand("transfer", "move balance");
        add_genesis(transfer_cmd);
        add_chain(transfer_cmd);
        add_keys(transfer_cmd);
        auto from = std::make_shared<std::string>();
        auto to = std::make_shared<std::string>();
        auto amount = std::make_shared<std::uint64_t>();
        transfer_cmd->add_option("--from", *from)->required();
        transfer_cmd->add_option("--to", *to)->required();
        transfer_cmd->add_option("--amount", *amount)->required();
        transfer_cmd->callback(run([&, from, to, amount]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*from),
                chain::Transfer{wallet.resolve(*to), *amount});
            print(out);
            return 0;
        }));
    }

    // -------------------------------------------------------- identity
    {
        auto* cmd = app.add_subcommand("identity",
                                       "identification authority contracts");
        cmd->require_subcommand(1);

        auto* deploy_cmd = cmd->add_subcommand("deploy", "deploy an authority");
        add_genesis(deploy_cmd);
        add_chain(deploy_cmd);
        add_keys(deploy_cmd);
        auto from = std::make_shared<std::string>();
        auto owner_name = std::make_shared<std::string>();
        auto owner_cert = std::make_shared<std::string>();
        deploy_cmd->add_option("--from", *from)->required();
        deploy_cmd->add_option("--owner-name", *owner_name)->required();
        deploy_cmd->add_option("--owner-certificate", *owner_cert);
        deploy_cmd->callback(run([&, from, owner_name, owner_cert]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            const KeyPair& sender = wallet.get(*from);
            const Address contract = chain::contract_address(
                sender.address(), ctx.state.nonce(sender.address()));
            auto out = ctx.apply_and_save(
                chain_path, sender,
                chain::DeployAuthority{{*owner_name, *owner_cert}});
            out["contract"] = to_hex(contract);
            print(out);
            return 0;
        }));

        auto* issue_cmd = cmd->add_subcommand("issue", "issue a certificate");
        add_genesis(issue_cmd);
        add_chain(issue_cmd);
        add_keys(issue_cmd);
        auto issue_from = std::make_shared<std::string>();
        auto contract = std::make_shared<std::string>();
        auto subject_name = std::make_shared<std::string>();
        auto subject_cert = std::make_shared<std::string>();
        auto subject = std::make_shared<std::string>();
        auto role = std::make_shared<std::string>();
        auto metadata = std::make_shared<std::string>();
        issue_cmd->add_option("--from", *issue_from)->required();
        issue_cmd->add_option("--contract", *contract)->required();
        issue_cmd->add_option("--subject-name", *subject_name)->required();
        issue_cmd->add_option("--subject-certificate", *subject_cert,
                              "explicit certificate string");
        issue_cmd->add_option("--subject", *subject,
                              "wallet key to certify (builds the certificate)");
        issue_cmd->add_option("--role", *role,
                              "member-state-authority|manufacturer|conformity-"
                              "assessment-body|device|verified-consumer");
        issue_cmd->add_option("--metadata", *metadata);
        issue_cmd->callback(run([&, issue_from, contract, subject_name,
                                 subject_cert, subject, role, metadata]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            std::string certificate = *subject_cert;
            if (certificate.empty()) {
                if (subject->empty() || role->empty()) {
                    fail("BadArguments",
                         "provide --subject-certificate or --subject with "
                         "--role");
                }
                auto r = identity::role_from_string(*role);
                if (!r) fail("BadRole", "unknown role " + *role);
                certificate = identity::SubjectCertificate::for_key(
                                  wallet.get(*subject).public_key, *r,
                                  *metadata)
                                  .encode();
            }
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*issue_from),
                chain::CallContract{
                    wallet.resolve(*contract),
                    identity::AuthorityCall{identity::IssueCertificate{
                        *subject_name, certificate}}});
            print(out);
            return 0;
        }));

        auto* revoke_cmd = cmd->add_subcommand("revoke", "revoke by subject name");
        add_genesis(revoke_cmd);
        add_chain(revoke_cmd);
        add_keys(revoke_cmd);
        auto revoke_from = std::make_shared<std::string>();
        auto revoke_contract = std::make_shared<std::string>();
        auto revoke_subject = std::make_shared<std::string>();
        revoke_cmd->add_option("--from", *revoke_from)->required();
        revoke_cmd->add_option("--contract", *revoke_contract)->required();
        revoke_cmd->add_option("--subject-name", *revoke_subject)->required();
        revoke_cmd->callback(run([&, revoke_from, revoke_contract,
                                  revoke_subject]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*revoke_from),
                chain::CallContract{wallet.resolve(*revoke_contract),
                                    identity::AuthorityCall{
                                        identity::RevokeCertificate{
                                            *revoke_subject}}});
            print(out);
            return 0;
        }));

        auto* verify_cmd =
            cmd->add_subcommand("verify", "verify an identity chain");
        add_genesis(verify_cmd);
        add_chain(verify_cmd);
        auto root = std::make_shared<std::string>();
        auto path_file = std::make_shared<std::string>();
        verify_cmd->add_option("--root", *root, "trusted root contract")
            ->required();
        verify_cmd
            ->add_option("--path", *path_file,
                         "JSON array of {authority, subject-name}")
            ->required();
        verify_cmd->callback(run([&, root, path_file]() {
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto root_address = address_from_hex(*root);
            if (!root_address) fail("BadAddress", "bad root address");
            json spec = json::parse(read_text(*path_file), nullptr, false);
            auto chain_spec = load_chain_path_spec(ctx, spec);
            auto v = identity::verify_chain(ctx.state.authority_lookup(),
                                            *root_address, chain_spec);
            ordered_json out;
            out["valid"] = v.valid;
            if (!v.valid) {
                out["reason"] = std::string(identity::to_string(v.reason));
                out["level"] = v.level;
            }
            print(out);
            return v.valid ? 0 : 1;
        }));

        auto* consumer_cmd = cmd->add_subcommand(
            "register-consumer", "certify a fresh anonymous consumer identity");
        add_genesis(consumer_cmd);
        add_chain(consumer_cmd);
        add_keys(consumer_cmd);
        auto consumer_from = std::make_shared<std::string>();
        auto consumer_contract = std::make_shared<std::string>();
        auto device_id = std::make_shared<std::string>();
        auto save_key = std::make_shared<std::string>();
        consumer_cmd->add_option("--from", *consumer_from)->required();
        consumer_cmd->add_option("--contract", *consumer_contract)->required();
        consumer_cmd->add_option("--device-id", *device_id)->required();
        consumer_cmd->add_option("--save-key", *save_key,
                                 "store the consumer key under this name");
        consumer_cmd->callback(run([&, consumer_from, consumer_contract,
                                    device_id, save_key]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto registration = identity::make_anonymous_consumer(*device_id);
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*consumer_from),
                chain::CallContract{wallet.resolve(*consumer_contract),
                                    identity::AuthorityCall{registration.call}});
            out["consumer"] = to_hex(registration.consumer_keys.address());
            if (!save_key->empty()) {
                wallet.keys.emplace(*save_key, registration.consumer_keys);
                wallet.save(keys_path);
                out["saved-as"] = *save_key;
            }
            print(out);
            return 0;
        }));
    }

    // -------------------------------------------------------- registry
    {
        auto* cmd = app.add_subcommand("registry", "device registry contracts");
        cmd->require_subcommand(1);

        auto* deploy_cmd = cmd->add_subcommand("deploy", "deploy a registry");
        add_genesis(deploy_cmd);
        add_chain(deploy_cmd);
        add_keys(deploy_cmd);
        auto from = std::make_shared<std::string>();
        auto mfg_name = std::make_shared<std::string>();
        auto id_contract = std::make_shared<std::string>();
        auto device_id = std::make_shared<std::string>();
        deploy_cmd->add_option("--from", *from)->required();
        deploy_cmd->add_option("--manufacturer-name", *mfg_name)->required();
        deploy_cmd->add_option("--id-contract", *id_contract)->required();
        deploy_cmd->add_option("--device-id", *device_id)->required();
        deploy_cmd->callback(run([&, from, mfg_name, id_contract, device_id]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            const KeyPair& sender = wallet.get(*from);
            const Address contract = chain::contract_address(
                sender.address(), ctx.state.nonce(sender.address()));
            auto out = ctx.apply_and_save(
                chain_path, sender,
                chain::DeployRegistry{{*mfg_name,
                                       wallet.resolve(*id_contract),
                                       *device_id}});
            out["contract"] = to_hex(contract);
            print(out);
            return 0;
        }));

        auto* body_cmd =
            cmd->add_subcommand("set-body", "designate the assessment body");
        add_genesis(body_cmd);
        add_chain(body_cmd);
        add_keys(body_cmd);
        auto body_from = std::make_shared<std::string>();
        auto body_contract = std::make_shared<std::string>();
        auto body = std::make_shared<std::string>();
        auto body_name = std::make_shared<std::string>();
        auto body_id = std::make_shared<std::string>();
        body_cmd->add_option("--from", *body_from)->required();
        body_cmd->add_option("--contract", *body_contract)->required();
        body_cmd->add_option("--body", *body)->required();
        body_cmd->add_option("--body-name", *body_name)->required();
        body_cmd->add_option("--body-id-contract", *body_id)->required();
        body_cmd->callback(run([&, body_from, body_contract, body, body_name,
                                body_id]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*body_from),
                chain::CallContract{
                    wallet.resolve(*body_contract),
                    registry::RegistryCall{registry::SetAssessmentBody{
                        wallet.resolve(*body), *body_name,
                        wallet.resolve(*body_id)}}});
            print(out);
            return 0;
        }));

        auto* register_cmd =
            cmd->add_subcommand("register", "register a file reference");
        add_genesis(register_cmd);
        add_chain(register_cmd);
        add_keys(register_cmd);
        add_store(register_cmd, false);
        auto reg_from = std::make_shared<std::string>();
        auto reg_contract = std::make_shared<std::string>();
        auto file_type = std::make_shared<std::string>();
        auto file_path = std::make_shared<std::string>();
        auto location = std::make_shared<std::string>();
        auto hash_hex = std::make_shared<std::string>();
        register_cmd->add_option("--from", *reg_from)->required();
        register_cmd->add_option("--contract", *reg_contract)->required();
        register_cmd->add_option("--type", *file_type)->required();
        register_cmd->add_option("--file", *file_path,
                                 "content to publish into the store");
        register_cmd->add_option("--location", *location,
                                 "pre-existing off-chain locator");
        register_cmd->add_option("--hash", *hash_hex,
                                 "32-byte content hash (with --location)");
        register_cmd->callback(run([&, reg_from, reg_contract, file_type,
                                    file_path, location, hash_hex]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            std::string loc = *location;
            std::vector<std::uint8_t> hash;
            if (!file_path->empty()) {
                if (store_path.empty()) {
                    fail("BadArguments", "--file requires --store");
                }
                store::ContentStore store(store_path);
                auto put = store.put(read_binary(*file_path));
                loc = put.location;
                hash.assign(put.hash.begin(), put.hash.end());
            } else {
                auto parsed = bytes_from_hex(*hash_hex);
                if (!parsed) fail("BadHash", "malformed --hash");
                hash = *parsed;
            }
            auto out = ctx.apply_and_save(
                chain_path, wallet.get(*reg_from),
                chain::CallContract{wallet.resolve(*reg_contract),
                                    registry::RegistryCall{registry::RegisterFile{
                                        *file_type, loc, hash}}});
            out["location"] = loc;
            print(out);
            return 0;
        }));

        auto* latest_cmd =
            cmd->add_subcommand("latest", "latest file reference of a type");
        add_genesis(latest_cmd);
        add_chain(latest_cmd);
        auto latest_contract = std::make_shared<std::string>();
        auto latest_type = std::make_shared<std::string>();
        latest_cmd->add_option("--contract", *latest_contract)->required();
        latest_cmd->add_option("--type", *latest_type)->required();
        latest_cmd->callback(run([&, latest_contract, latest_type]() {
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto address = address_from_hex(*latest_contract);
            if (!address) fail("BadAddress", "bad contract address");
            const auto* reg = ctx.state.registry_at(*address);
            if (reg == nullptr) fail("UnknownRegistry", "no registry there");
            const auto* event = registry::latest_file(*reg, *latest_type);
            if (event == nullptr) {
                print(ordered_json{{"found", false}});
                return 0;
            }
            print(ordered_json{{"found", true},
                               {"sender", to_hex(event->sender)},
                               {"device-id", event->device_id},
                               {"file-type", event->file_type},
                               {"file-location", event->file_location},
                               {"file-hash", to_hex(event->file_hash)},
                               {"block", event->block_height}});
            return 0;
        }));

        auto* log_cmd = cmd->add_subcommand("log", "file event log");
        add_genesis(log_cmd);
        add_chain(log_cmd);
        auto log_contract = std::make_shared<std::string>();
        log_cmd->add_option("--contract", *log_contract)->required();
        log_cmd->callback(run([&, log_contract]() {
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            auto address = address_from_hex(*log_contract);
            if (!address) fail("BadAddress", "bad contract address");
            const auto* reg = ctx.state.registry_at(*address);
            if (reg == nullptr) fail("UnknownRegistry", "no registry there");
            for (const auto& event : reg->file_log) {
                print(ordered_json{{"sender", to_hex(event.sender)},
                                   {"device-id", event.device_id},
                                   {"file-type", event.file_type},
                                   {"file-location", event.file_location},
                                   {"file-hash", to_hex(event.file_hash)},
                                   {"block", event.block_height}});
            }
            return 0;
        }));
    }

    // -------------------------------------------------------- store
    {
        auto* cmd = app.add_subcommand("store", "off-chain content store");
        cmd->require_subcommand(1);

        auto* put_cmd = cmd->add_subcommand("put", "store a file");
        add_store(put_cmd);
        auto put_file = std::make_shared<std::string>();
        put_cmd->add_option("--file", *put_file)->required();
        put_cmd->callback(run([&, put_file]() {
            store::ContentStore store(store_path);
            auto put = store.put(read_binary(*put_file));
            print(ordered_json{{"location", put.location},
                               {"hash", to_hex(put.hash)}});
            return 0;
        }));

        auto* get_cmd = cmd->add_subcommand("get", "fetch stored bytes");
        add_store(get_cmd);
        auto get_location = std::make_shared<std::string>();
        auto get_out = std::make_shared<std::string>();
        get_cmd->add_option("--location", *get_location)->required();
        get_cmd->add_option("--out", *get_out, "output file (default stdout)");
        get_cmd->callback(run([&, get_location, get_out]() {
            store::ContentStore store(store_path);
            auto content = store.get(*get_location);
            if (!content) fail("NotFound", "no object at " + *get_location);
            if (get_out->empty()) {
                std::cout.write(reinterpret_cast<const char*>(content->data()),
                                static_cast<std::streamsize>(content->size()));
            } else {
                std::ofstream out(*get_out, std::ios::binary | std::ios::trunc);
                out.write(reinterpret_cast<const char*>(content->data()),
                          static_cast<std::streamsize>(content->size()));
            }
            return 0;
        }));

        auto* verify_cmd =
            cmd->add_subcommand("verify", "check content against a hash");
        add_store(verify_cmd);
        auto verify_location = std::make_shared<std::string>();
        auto verify_file = std::make_shared<std::string>();
        auto verify_hash = std::make_shared<std::string>();
        verify_cmd->add_option("--location", *verify_location);
        verify_cmd->add_option("--file", *verify_file);
        verify_cmd->add_option("--hash", *verify_hash)->required();
        verify_cmd->callback(run([&, verify_location, verify_file,
                                  verify_hash]() {
            auto expected = digest_from_hex(*verify_hash);
            if (!expected) fail("BadHash", "malformed --hash");
            std::vector<std::uint8_t> content;
            if (!verify_file->empty()) {
                content = read_binary(*verify_file);
            } else {
                store::ContentStore store(store_path);
                auto fetched = store.get(*verify_location);
                if (!fetched) fail("NotFound", "no object there");
                content = *fetched;
            }
            const bool ok = store::ContentStore::verify(content, *expected);
            print(ordered_json{{"ok", ok}});
            return ok ? 0 : 1;
        }));
    }

    // -------------------------------------------------------- mud
    {
        auto* cmd = app.add_subcommand("mud", "MUD file toolchain");
        cmd->require_subcommand(1);

        auto* check_cmd = cmd->add_subcommand("check", "parse and validate");
        auto check_file = std::make_shared<std::string>();
        check_cmd->add_option("file", *check_file)->required();
        check_cmd->callback(run([&, check_file]() {
            mud::MudFile m;
            try {
                m = mud::parse(std::string_view(read_text(*check_file)));
            } catch (const mud::ParseError& e) {
                ordered_json out;
                out["ok"] = false;
                out["error"] = {{"code", std::string(to_string(e.code()))},
                                {"path", e.path()},
                                {"detail", e.what()}};
                print(out);
                return 1;
            }
            auto violations = mud::validate(m);
            ordered_json out;
            out["ok"] = violations.empty();
            out["mud-version"] = m.mud_version;
            out["mfg-name"] = m.mfg_name;
            out["model-name"] = m.model_name;
            out["cache-validity"] = m.cache_validity;
            if (!violations.empty()) {
                ordered_json list = ordered_json::array();
                for (const auto& v : violations) {
                    list.push_back({{"code", v.code},
                                    {"path", v.path},
                                    {"detail", v.detail}});
                }
                out["violations"] = list;
            }
            print(out);
            return violations.empty() ? 0 : 1;
        }));

        auto* compile_cmd =
            cmd->add_subcommand("compile", "compile to concrete rules");
        auto compile_file = std::make_shared<std::string>();
        auto inventory_file = std::make_shared<std::string>();
        compile_cmd->add_option("file", *compile_file)->required();
        compile_cmd
            ->add_option("--inventory", *inventory_file,
                         "JSON array of {address, mfg-name}")
            ->required();
        compile_cmd->callback(run([&, compile_file, inventory_file]() {
            mud::MudFile m;
            try {
                m = mud::parse(std::string_view(read_text(*compile_file)));
            } catch (const mud::ParseError& e) {
                fail(std::string(to_string(e.code())), e.what());
            }
            auto violations = mud::validate(m);
            if (!violations.empty()) {
                fail("Invalid", "file has " +
                                    std::to_string(violations.size()) +
                                    " validation violations");
            }
            json inv = json::parse(read_text(*inventory_file), nullptr, false);
            if (!inv.is_array()) fail("BadInventory", "expected a JSON array");
            mud::Inventory inventory;
            for (const auto& entry : inv) {
                auto a = address_from_hex(entry.value("address", ""));
                if (!a) fail("BadInventory", "bad address in inventory");
                inventory[*a] = entry.value("mfg-name", "");
            }
            auto rules = mud::compile(m, inventory);
            for (const auto& rule : rules) {
                ordered_json out;
                out["rule"] = rule.id();
                out["direction"] = std::string(mud::to_string(rule.direction));
                if (rule.any_peer) {
                    out["peers"] = "any";
                } else {
                    ordered_json peers = ordered_json::array();
                    for (const auto& peer : rule.peers) {
                        peers.push_back(to_hex(peer));
                    }
                    out["peers"] = peers;
                }
                if (rule.protocol) out["protocol"] = *rule.protocol;
                if (rule.src_port) out["src-port"] = *rule.src_port;
                if (rule.dst_port) out["dst-port"] = *rule.dst_port;
                out["action"] = "accept";
                print(out);
            }
            return 0;
        }));
    }

    // -------------------------------------------------------- controller
    {
        auto* cmd = app.add_subcommand("controller", "simulated SDN controller");
        cmd->require_subcommand(1);
        auto* run_cmd =
            cmd->add_subcommand("run", "onboard devices and filter flows");
        add_genesis(run_cmd);
        add_chain(run_cmd);
        add_keys(run_cmd);
        add_store(run_cmd);
        auto scenario_file = std::make_shared<std::string>();
        run_cmd->add_option("--scenario", *scenario_file)->required();
        run_cmd->callback(run([&, scenario_file]() {
            Wallet wallet = Wallet::load(keys_path);
            return run_controller(*scenario_file, genesis_path, chain_path,
                                  store_path, wallet);
        }));
    }

    // -------------------------------------------------------- vuln
    {
        auto* cmd = app.add_subcommand("vuln", "vulnerability disclosure");
        cmd->require_subcommand(1);

        auto* disclose_cmd =
            cmd->add_subcommand("disclose", "encrypted disclosure commitment");
        add_genesis(disclose_cmd);
        add_chain(disclose_cmd);
        add_keys(disclose_cmd);
        add_store(disclose_cmd);
        auto from = std::make_shared<std::string>();
        auto registry_ref = std::make_shared<std::string>();
        auto details_file = std::make_shared<std::string>();
        auto mfg_key = std::make_shared<std::string>();
        disclose_cmd->add_option("--from", *from)->required();
        disclose_cmd->add_option("--registry", *registry_ref)->required();
        disclose_cmd->add_option("--details-file", *details_file)->required();
        disclose_cmd
            ->add_option("--manufacturer-key", *mfg_key,
                         "manufacturer public key (hex) or wallet name")
            ->required();
        disclose_cmd->callback(run([&, from, registry_ref, details_file,
                                    mfg_key]() {
            Wallet wallet = Wallet::load(keys_path);
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            PublicKey recipient;
            if (mfg_key->starts_with("0x")) {
                auto parsed = public_key_from_hex(*mfg_key);
                if (!parsed) fail("BadKey", "malformed manufacturer key");
                recipient = *parsed;
            } else {
                recipient = wallet.get(*mfg_key).public_key;
            }
            auto details = read_binary(*details_file);
            auto package = vulndisc::prepare_disclosure(recipient, details);
            if (!package) {
                fail("EncryptionFailure", "cannot encrypt to that key");
            }
            store::ContentStore store(store_path);
            auto put = store.put(package->ciphertext);
            const Address registry_address = wallet.resolve(*registry_ref);
            const KeyPair& sender = wallet.get(*from);
            auto out = ctx.apply_and_save(
                chain_path, sender,
                chain::CallContract{registry_address,
                                    registry::RegistryCall{registry::Disclose{
                                        put.location,
                                        package->ciphertext_hash}}});
            out["disclosure"] = to_hex(vulndisc::disclosure_id(
                registry_address, sender.address(), put.location,
                package->ciphertext_hash));
            out["ciphertext-location"] = put.location;
            out["ciphertext-hash"] = to_hex(package->ciphertext_hash);
            print(out);
            return 0;
        }));

        auto* decrypt_cmd =
            cmd->add_subcommand("decrypt", "open a disclosure ciphertext");
        add_keys(decrypt_cmd);
        add_store(decrypt_cmd);
        auto key_name = std::make_shared<std::string>();
        auto ct_location = std::make_shared<std::string>();
        auto out_file = std::make_shared<std::string>();
        decrypt_cmd->add_option("--key", *key_name)->required();
        decrypt_cmd->add_option("--location", *ct_location)->required();
        decrypt_cmd->add_option("--out", *out_file);
        decrypt_cmd->callback(run([&, key_name, ct_location, out_file]() {
            Wallet wallet = Wallet::load(keys_path);
            store::ContentStore store(store_path);
            auto ciphertext = store.get(*ct_location);
            if (!ciphertext) fail("NotFound", "no ciphertext there");
            auto opened =
                vulndisc::open_disclosure(wallet.get(*key_name), *ciphertext);
            if (!opened) fail("DecryptionFailure", "key cannot open this");
            if (out_file->empty()) {
                std::cout.write(reinterpret_cast<const char*>(opened->data()),
                                static_cast<std::streamsize>(opened->size()));
            } else {
                std::ofstream out(*out_file, std::ios::binary | std::ios::trunc);
                out.write(reinterpret_cast<const char*>(opened->data()),
                          static_cast<std::streamsize>(opened->size()));
            }
            return 0;
        }));

        auto add_transition = [&](const std::string& name,
                                  const std::string& help,
                                  auto make_call) {
            auto* sub = cmd->add_subcommand(name, help);
            add_genesis(sub);
            add_chain(sub);
            add_keys(sub);
            auto t_from = std::make_shared<std::string>();
            auto t_registry = std::make_shared<std::string>();
            auto t_id = std::make_shared<std::string>();
            sub->add_option("--from", *t_from)->required();
            sub->add_option("--registry", *t_registry)->required();
            sub->add_option("--id", *t_id)->required();
            sub->callback(run([&, t_from, t_registry, t_id, make_call]() {
                Wallet wallet = Wallet::load(keys_path);
                auto ctx = ChainCtx::load(genesis_path, chain_path);
                auto id = digest_from_hex(*t_id);
                if (!id) fail("BadId", "malformed disclosure id");
                auto out = ctx.apply_and_save(
                    chain_path, wallet.get(*t_from),
                    chain::CallContract{wallet.resolve(*t_registry),
                                        registry::RegistryCall{make_call(*id)}});
                print(out);
                return 0;
            }));
        };
        add_transition("ack", "manufacturer acknowledges", [](const Digest& id) {
            return registry::RegistryCall{registry::UpdateDisclosure{
                id, vulndisc::Status::Acknowledged}};
        });
        add_transition("remediate", "manufacturer remediates",
                       [](const Digest& id) {
                           return registry::RegistryCall{
                               registry::UpdateDisclosure{
                                   id, vulndisc::Status::Remediated}};
                       });
        add_transition("publish", "report to the NCCA", [](const Digest& id) {
            return registry::RegistryCall{registry::PublishDisclosure{id}};
        });

        auto* feed_cmd =
            cmd->add_subcommand("feed", "published vulnerability feed");
        add_genesis(feed_cmd);
        add_chain(feed_cmd);
        feed_cmd->callback(run([&]() {
            auto ctx = ChainCtx::load(genesis_path, chain_path);
            for (const auto& line : audit::vulnerability_feed(ctx.state)) {
                std::cout << line << "\n";
            }
            return 0;
        }));
    }

    // -------------------------------------------------------- scenario
    {
        auto* cmd = app.add_subcommand("scenario", "scripted end-to-end runs");
        cmd->require_subcommand(1);
        auto* run_cmd = cmd->add_subcommand("run", "execute a scenario file");
        add_store(run_cmd, false);
        auto scenario_file = std::make_shared<std::string>();
        auto seed = std::make_shared<std::int64_t>(-1);
        auto save_chain = std::make_shared<std::string>();
        auto save_genesis = std::make_shared<std::string>();
        run_cmd->add_option("file", *scenario_file)->required();
        run_cmd->add_option("--seed", *seed, "fixes all randomness");
        run_cmd->add_option("--save-chain", *save_chain,
                            "persist the resulting chain file");
        run_cmd->add_option("--save-genesis", *save_genesis,
                            "persist the generated genesis configuration");
        run_cmd->callback(run([&, scenario_file, seed, save_chain,
                               save_genesis]() {
            scenario::ScenarioRunner::Options options;
            options.base_dir =
                std::filesystem::path(*scenario_file).parent_path();
            options.store_dir =
                store_path.empty()
                    ? std::filesystem::temp_directory_path() /
                          "certledger-scenario-store"
                    : std::filesystem::path(store_path);
            if (*seed >= 0) {
                options.seed = static_cast<std::uint64_t>(*seed);
            }
            scenario::ScenarioRunner runner(read_text(*scenario_file),
                                            options);
            const bool ok = runner.run();
            for (const auto& line : runner.log()) {
                std::cout << line << "\n";
            }
            if (!save_chain->empty()) {
                chain::save_chain(*save_chain,
                                  runner.validator()->canonical_chain());
            }
            if (!save_genesis->empty()) {
                chain::save_genesis(*save_genesis, runner.genesis());
            }
            return ok ? 0 : 1;
        }));
    }

    // -------------------------------------------------------- audit
    {
        auto* cmd = app.add_subcommand(
            "audit", "chronological event export of a chain file");
        add_genesis(cmd);
        add_chain(cmd);
        cmd->callback(run([&]() {
            auto genesis = chain::load_genesis(genesis_path);
            auto blocks = chain::load_chain(chain_path);
            for (const auto& line : audit::export_events(genesis, blocks)) {
                std::cout << line << "\n";
            }
            return 0;
        }));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return exit_code;
}
