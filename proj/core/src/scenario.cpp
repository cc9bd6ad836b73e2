// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <stdexcept>

#include "certledger/audit.hpp"
#include "certledger/vulndisc.hpp"

namespace certledger::scenario {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class ScenarioConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string get_string(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw ScenarioConfigError("missing string field \"" + key + "\"");
    }
    return j[key].get<std::string>();
}

std::string get_string_or(const json& j, const std::string& key,
                          const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) {
        throw ScenarioConfigError("field \"" + key + "\" must be a string");
    }
    return j[key].get<std::string>();
}

std::int64_t get_int(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw ScenarioConfigError("missing integer field \"" + key + "\"");
    }
    return j[key].get<std::int64_t>();
}

std::int64_t get_int_or(const json& j, const std::string& key,
                        std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    return get_int(j, key);
}

}  // namespace

struct ScenarioRunner::Impl {
    json config;
    Options options;
    std::uint64_t seed = 0;

    chain::GenesisConfig genesis;
    std::map<std::string, KeyPair> actors;
    std::map<std::string, std::string> bindings;  // name -> hex string
    KeyPair validator_keys;

    chain::Network network;
    std::shared_ptr<chain::Node> validator_node;
    std::shared_ptr<chain::Node> observer_node;
    std::unique_ptr<store::ContentStore> store;
    std::unique_ptr<controller::Controller> controller;

    std::int64_t virtual_now = 1'558'000'000;  // fixed start, advances by steps
    std::uint64_t challenge_counter = 0;
    std::vector<std::string> log_lines;
    bool failed = false;

    Digest derive(const std::string& domain, const std::string& name) const {
        return sha256(domain + "|" + std::to_string(seed) + "|" + name);
    }

    KeyPair keys_for(const std::string& name) const {
        return keypair_from_seed(derive("certledger.actor.v1", name));
    }

    const KeyPair& actor(const std::string& name) const {
        auto it = actors.find(name);
        if (it == actors.end()) {
            throw ScenarioConfigError("unknown actor \"" + name + "\"");
        }
        return it->second;
    }

    Address resolve(const std::string& ref) const {
        if (ref.starts_with("0x")) {
            auto a = address_from_hex(ref);
            if (!a) throw ScenarioConfigError("bad address \"" + ref + "\"");
            return *a;
        }
        auto bound = bindings.find(ref);
        if (bound != bindings.end()) {
            auto a = address_from_hex(bound->second);
            if (a) return *a;
        }
        auto it = actors.find(ref);
        if (it != actors.end()) return it->second.address();
        throw ScenarioConfigError("unresolvable reference \"" + ref + "\"");
    }

    Digest resolve_digest(const std::string& ref) const {
        if (ref.starts_with("0x")) {
            auto d = digest_from_hex(ref);
            if (!d) throw ScenarioConfigError("bad digest \"" + ref + "\"");
            return *d;
        }
        auto bound = bindings.find(ref);
        if (bound != bindings.end()) {
            auto d = digest_from_hex(bound->second);
            if (d) return *d;
        }
        throw ScenarioConfigError("unresolvable digest \"" + ref + "\"");
    }

    void setup();
    controller::Controller& ensure_controller();
    bool run_steps();
    ordered_json run_step(const json& step);

    struct TxOutcome {
        bool accepted = false;
        std::optional<TxError> error;
        Digest txid{};
        std::uint64_t block_height = 0;
    };

    TxOutcome submit_and_mine(const KeyPair& sender, chain::Payload payload);
    identity::IdentityChain build_identity_chain(const json& links) const;
    std::vector<std::uint8_t> read_file(const std::string& rel) const;
};

void ScenarioRunner::Impl::setup() {
    if (options.seed) {
        seed = *options.seed;
    } else if (config.contains("seed")) {
        seed = static_cast<std::uint64_t>(get_int(config, "seed"));
    } else {
        auto random = random_bytes(8);
        for (auto b : random) seed = (seed << 8) | b;
    }

    genesis.difficulty_bits =
        static_cast<unsigned>(get_int_or(config, "difficulty-bits", 8));
    genesis.reward = static_cast<chain::Amount>(get_int_or(config, "reward", 2));
    genesis.fee = static_cast<chain::Amount>(get_int_or(config, "fee", 1));
    genesis.embargo_blocks =
        static_cast<std::uint64_t>(get_int_or(config, "embargo-blocks", 144));

    if (config.contains("actors")) {
        for (const auto& entry : config["actors"]) {
            const std::string name = get_string(entry, "name");
            actors.emplace(name, keys_for(name));
        }
    }
    validator_keys = keys_for("__validator__");
    genesis.validators.push_back(validator_keys.address());

    if (config.contains("allocations")) {
        for (const auto& entry : config["allocations"]) {
            const std::string who = get_string(entry, "actor");
            genesis.allocations.emplace_back(
                actor(who).address(),
                static_cast<chain::Amount>(get_int(entry, "amount")));
        }
    }

    auto clock = [this] { return virtual_now; };
    validator_node = std::make_shared<chain::Node>(
        chain::NodeRole::Validator, genesis, validator_keys, clock);
    observer_node = std::make_shared<chain::Node>(chain::NodeRole::Observer,
                                                  genesis, std::nullopt, clock);
    network.add_node(validator_node);
    network.add_node(observer_node);

    std::filesystem::create_directories(options.store_dir);
    store = std::make_unique<store::ContentStore>(options.store_dir);
}

controller::Controller& ScenarioRunner::Impl::ensure_controller() {
    if (!controller) {
        Address root = resolve(get_string(config, "trusted-root"));
        auto challenges = [this] {
            return derive("certledger.challenge.v1",
                          std::to_string(challenge_counter++));
        };
        controller = std::make_unique<controller::Controller>(
            root, observer_node, *store, [this] { return virtual_now; },
            challenges);
        mud::Inventory inventory;
        if (config.contains("inventory")) {
            for (const auto& entry : config["inventory"]) {
                inventory[resolve(get_string(entry, "device"))] =
                    get_string(entry, "mfg-name");
            }
        }
        controller->set_inventory(std::move(inventory));
    }
    return *controller;
}

ScenarioRunner::Impl::TxOutcome ScenarioRunner::Impl::submit_and_mine(
    const KeyPair& sender, chain::Payload payload) {
    TxOutcome outcome;
    const std::uint64_t nonce =
        validator_node->state().nonce(sender.address());
    auto tx = chain::make_transaction(sender, std::move(payload), nonce,
                                      genesis.fee);
    outcome.txid = chain::transaction_id(tx);

    // Validate against the exact landing height first so a rejected call
    // reports its precise reason and leaves the chain untouched.
    chain::LedgerState probe = validator_node->state();
    outcome.error = chain::apply_transaction(probe, tx, genesis,
                                             validator_node->height() + 1,
                                             validator_keys.address());
    if (outcome.error) {
        return outcome;
    }
    auto submitted = network.submit(tx);
    if (!submitted.accepted) {
        outcome.error = submitted.error;
        return outcome;
    }
    auto mined = validator_node->mine_and_announce();
    outcome.block_height = mined.block.height;
    for (const auto& mined_tx : mined.block.transactions) {
        if (chain::transaction_id(mined_tx) == outcome.txid) {
            outcome.accepted = true;
            return outcome;
        }
    }
    outcome.error = TxError{TxErrorCode::InvalidArgument,
                            "transaction dropped during block building"};
    return outcome;
}

identity::IdentityChain ScenarioRunner::Impl::build_identity_chain(
    const json& links) const {
    identity::IdentityChain chain_path;
    const chain::LedgerState state = observer_node->state();
    for (const auto& entry : links) {
        identity::ChainLink link;
        link.authority = resolve(get_string(entry, "authority"));
        const std::string subject_name = get_string(entry, "subject-name");
        if (const auto* auth = state.authority(link.authority)) {
            if (const auto* event =
                    identity::latest_issued(*auth, subject_name)) {
                link.event = *event;
            } else {
                link.event.subject_name = subject_name;  // will fail NotIssued
            }
        } else {
            link.event.subject_name = subject_name;
        }
        chain_path.links.push_back(std::move(link));
    }
    return chain_path;
}

std::vector<std::uint8_t> ScenarioRunner::Impl::read_file(
    const std::string& rel) const {
    std::filesystem::path path = rel;
    if (path.is_relative()) path = options.base_dir / path;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioConfigError("cannot read file " + path.string());
    }
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

ordered_json ScenarioRunner::Impl::run_step(const json& step) {
    const std::string op = get_string(step, "op");
    ordered_json out;
    out["op"] = op;

    auto record_tx = [&](const TxOutcome& outcome,
                         const std::string& expect) -> bool {
        if (outcome.accepted) {
            out["result"] = "ok";
            out["tx"] = to_hex(outcome.txid);
            out["block"] = outcome.block_height;
        } else {
            out["result"] = "error";
            if (outcome.error) {
                out["error"] = std::string(to_string(outcome.error->code));
                out["detail"] = outcome.error->detail;
            }
        }
        if (expect == "ok") return outcome.accepted;
        if (expect == "error") return !outcome.accepted;
        if (expect.starts_with("error:")) {
            return !outcome.accepted && outcome.error &&
                   to_string(outcome.error->code) == expect.substr(6);
        }
        return false;
    };
    const std::string expect = get_string_or(step, "expect", "ok");

    if (op == "deploy-authority") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        identity::AuthorityInit init{get_string(step, "owner-name"),
                                     get_string_or(step, "owner-certificate",
                                                   "")};
        const std::uint64_t nonce =
            validator_node->state().nonce(sender.address());
        Address contract = chain::contract_address(sender.address(), nonce);
        auto outcome =
            submit_and_mine(sender, chain::DeployAuthority{std::move(init)});
        bool ok = record_tx(outcome, expect);
        if (outcome.accepted) {
            out["contract"] = to_hex(contract);
            if (step.contains("bind")) {
                bindings[get_string(step, "bind")] = to_hex(contract);
            }
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "deploy-registry") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        registry::RegistryInit init{get_string(step, "manufacturer-name"),
                                    resolve(get_string(step, "id-contract")),
                                    get_string(step, "device-id")};
        const std::uint64_t nonce =
            validator_node->state().nonce(sender.address());
        Address contract = chain::contract_address(sender.address(), nonce);
        auto outcome =
            submit_and_mine(sender, chain::DeployRegistry{std::move(init)});
        bool ok = record_tx(outcome, expect);
        if (outcome.accepted) {
            out["contract"] = to_hex(contract);
            if (step.contains("bind")) {
                bindings[get_string(step, "bind")] = to_hex(contract);
            }
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "issue-certificate") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        std::string certificate;
        if (step.contains("subject-certificate")) {
            certificate = get_string(step, "subject-certificate");
        } else {
            const KeyPair& subject = actor(get_string(step, "subject"));
            auto role = identity::role_from_string(get_string(step, "role"));
            if (!role) throw ScenarioConfigError("unknown role");
            certificate = identity::SubjectCertificate::for_key(
                              subject.public_key, *role,
                              get_string_or(step, "metadata", ""))
                              .encode();
        }
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{resolve(get_string(step, "authority")),
                                identity::AuthorityCall{identity::IssueCertificate{
                                    get_string(step, "subject-name"),
                                    std::move(certificate)}}});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    if (op == "revoke-certificate") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{resolve(get_string(step, "authority")),
                                identity::AuthorityCall{identity::RevokeCertificate{
                                    get_string(step, "subject-name")}}});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    if (op == "register-consumer") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        auto registration = identity::make_anonymous_consumer(
            get_string(step, "device-id"),
            derive("certledger.consumer.v1",
                   std::to_string(challenge_counter++)));
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{resolve(get_string(step, "authority")),
                                identity::AuthorityCall{registration.call}});
        bool ok = record_tx(outcome, expect);
        if (outcome.accepted) {
            out["consumer"] = to_hex(registration.consumer_keys.address());
            if (step.contains("bind")) {
                const std::string name = get_string(step, "bind");
                actors.emplace(name, registration.consumer_keys);
                bindings[name] = to_hex(registration.consumer_keys.address());
            }
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "set-assessment-body") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        const std::string body_ref = get_string(step, "body");
        registry::SetAssessmentBody call{
            resolve(body_ref), get_string_or(step, "body-name", body_ref),
            step.contains("body-id-contract")
                ? resolve(get_string(step, "body-id-contract"))
                : Address{}};
        auto outcome = submit_and_mine(
            sender, chain::CallContract{resolve(get_string(step, "registry")),
                                        registry::RegistryCall{call}});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    if (op == "register-file") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        std::string location;
        Digest hash{};
        if (step.contains("file")) {
            auto content = read_file(get_string(step, "file"));
            auto put = store->put(std::span<const std::uint8_t>(content));
            location = put.location;
            hash = put.hash;
        } else {
            location = get_string(step, "location");
            auto h = digest_from_hex(get_string(step, "hash"));
            if (!h) throw ScenarioConfigError("bad hash");
            hash = *h;
        }
        registry::RegisterFile call{
            get_string(step, "file-type"), location,
            std::vector<std::uint8_t>(hash.begin(), hash.end())};
        auto outcome = submit_and_mine(
            sender, chain::CallContract{resolve(get_string(step, "registry")),
                                        registry::RegistryCall{call}});
        bool ok = record_tx(outcome, expect);
        if (outcome.accepted) {
            out["location"] = location;
            out["hash"] = to_hex(hash);
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "transfer") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        auto outcome = submit_and_mine(
            sender,
            chain::Transfer{resolve(get_string(step, "to")),
                            static_cast<chain::Amount>(get_int(step, "amount"))});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    if (op == "mine") {
        const std::int64_t count = get_int_or(step, "count", 1);
        for (std::int64_t i = 0; i < count; ++i) {
            validator_node->mine_and_announce();
        }
        out["result"] = "ok";
        out["height"] = validator_node->height();
        out["ok"] = true;
        return out;
    }
    if (op == "advance-time") {
        virtual_now += get_int(step, "hours") * 3600;
        out["result"] = "ok";
        out["now"] = virtual_now;
        out["ok"] = true;
        return out;
    }
    if (op == "authenticate") {
        auto& ctl = ensure_controller();
        const std::string device_name = get_string(step, "device");
        const KeyPair& device = actor(device_name);
        std::string credential;
        if (step.contains("credential")) {
            credential = get_string(step, "credential");
        } else {
            const chain::LedgerState state = observer_node->state();
            const auto* auth =
                state.authority(resolve(get_string(step, "authority")));
            const identity::CertificateIssued* event =
                auth ? identity::latest_issued(
                           *auth, get_string(step, "subject-name"))
                     : nullptr;
            if (event == nullptr) {
                throw ScenarioConfigError("no issued certificate for device");
            }
            credential = event->subject_certificate;
        }
        Digest challenge = ctl.issue_challenge();
        auto proof = controller::make_auth_proof(
            device, get_string(step, "device-id"), credential, challenge);
        auto result = ctl.authenticate(proof);
        out["result"] = result.authenticated ? "authenticated" : "rejected";
        if (result.failure) {
            out["reason"] =
                std::string(controller::to_string(*result.failure));
        }
        bool ok = expect == "ok" ? result.authenticated
                                 : (!result.authenticated &&
                                    (expect == "error" ||
                                     (result.failure &&
                                      "error:" + std::string(controller::to_string(
                                                     *result.failure)) ==
                                          expect)));
        out["ok"] = ok;
        return out;
    }
    if (op == "onboard") {
        auto& ctl = ensure_controller();
        controller::OnboardRequest request;
        request.device = resolve(get_string(step, "device"));
        request.device_id = get_string(step, "device-id");
        request.registry_contract = resolve(get_string(step, "registry"));
        if (!step.contains("identity-chain") ||
            !step["identity-chain"].is_array()) {
            throw ScenarioConfigError("onboard requires identity-chain");
        }
        request.identity_chain = build_identity_chain(step["identity-chain"]);
        auto result = ctl.onboard(request);
        out["result"] = std::string(controller::to_string(result.status));
        out["installed-rules"] = result.installed_rules;
        if (result.error) {
            out["error"] =
                std::string(controller::to_string(result.error->kind));
            out["detail"] = result.error->detail;
        }
        const std::string expectation =
            get_string_or(step, "expect", "onboarded");
        bool ok = out["result"] == expectation;
        if (expectation.starts_with("quarantined:") && result.error) {
            ok = out["result"] == "quarantined" &&
                 "quarantined:" +
                         std::string(controller::to_string(result.error->kind)) ==
                     expectation;
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "flow") {
        auto& ctl = ensure_controller();
        controller::PacketFlow flow;
        flow.src = resolve(get_string(step, "src"));
        flow.dst = resolve(get_string(step, "dst"));
        flow.protocol = static_cast<int>(get_int(step, "protocol"));
        flow.src_port = static_cast<int>(get_int(step, "src-port"));
        flow.dst_port = static_cast<int>(get_int(step, "dst-port"));
        auto decision =
            ctl.filter_flow(resolve(get_string(step, "device")), flow);
        out["flow"] = {{"src", to_hex(flow.src)},
                       {"dst", to_hex(flow.dst)},
                       {"protocol", flow.protocol},
                       {"src-port", flow.src_port},
                       {"dst-port", flow.dst_port}};
        out["decision"] = decision.allow ? "allow" : "deny";
        if (decision.allow) {
            out["matched-rule"] = decision.matched_rule;
        } else {
            out["reason"] = decision.reason;
        }
        const std::string expectation = get_string_or(step, "expect", "allow");
        out["ok"] = (out["decision"] == expectation);
        return out;
    }
    if (op == "refresh") {
        auto& ctl = ensure_controller();
        auto outcome =
            ctl.refresh(resolve(get_string(step, "device")), virtual_now);
        out["result"] = std::string(controller::to_string(outcome));
        const std::string expectation =
            get_string_or(step, "expect", std::string(out["result"]));
        out["ok"] = (out["result"] == expectation);
        return out;
    }
    if (op == "disclose") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        const KeyPair& manufacturer = actor(get_string(step, "manufacturer"));
        const std::string details = get_string(step, "details");
        auto package = vulndisc::prepare_disclosure(
            manufacturer.public_key,
            std::span<const std::uint8_t>(
                reinterpret_cast<const std::uint8_t*>(details.data()),
                details.size()));
        if (!package) throw ScenarioConfigError("encryption failure");
        auto put =
            store->put(std::span<const std::uint8_t>(package->ciphertext));
        Address registry_address = resolve(get_string(step, "registry"));
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{registry_address,
                                registry::RegistryCall{registry::Disclose{
                                    put.location, package->ciphertext_hash}}});
        bool ok = record_tx(outcome, expect);
        if (outcome.accepted) {
            Digest id = vulndisc::disclosure_id(registry_address,
                                                sender.address(), put.location,
                                                package->ciphertext_hash);
            out["disclosure"] = to_hex(id);
            if (step.contains("bind")) {
                bindings[get_string(step, "bind")] = to_hex(id);
            }
        }
        out["ok"] = ok;
        return out;
    }
    if (op == "update-disclosure") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        auto status =
            vulndisc::status_from_string(get_string(step, "status"));
        if (!status) throw ScenarioConfigError("bad status");
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{
                resolve(get_string(step, "registry")),
                registry::RegistryCall{registry::UpdateDisclosure{
                    resolve_digest(get_string(step, "id")), *status}}});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    if (op == "publish") {
        const KeyPair& sender = actor(get_string(step, "actor"));
        auto outcome = submit_and_mine(
            sender,
            chain::CallContract{
                resolve(get_string(step, "registry")),
                registry::RegistryCall{registry::PublishDisclosure{
                    resolve_digest(get_string(step, "id"))}}});
        out["ok"] = record_tx(outcome, expect);
        return out;
    }
    throw ScenarioConfigError("unknown step op \"" + op + "\"");
}

bool ScenarioRunner::Impl::run_steps() {
    if (!config.contains("steps") || !config["steps"].is_array()) {
        throw ScenarioConfigError("scenario has no steps array");
    }
    std::size_t index = 0;
    for (const auto& step : config["steps"]) {
        ordered_json line;
        try {
            line = run_step(step);
        } catch (const ScenarioConfigError& e) {
            line["op"] = step.contains("op") ? step["op"] : json("?");
            line["result"] = "error";
            line["error"] = e.what();
            line["ok"] = false;
        }
        line["step"] = index++;
        if (!line["ok"].get<bool>()) failed = true;
        log_lines.push_back(line.dump());
    }
    return !failed;
}

ScenarioRunner::ScenarioRunner(const std::string& config_json, Options options)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = json::parse(config_json, nullptr,
                                /*allow_exceptions=*/false);
    if (impl_->config.is_discarded() || !impl_->config.is_object()) {
        throw std::runtime_error("scenario config is not a JSON object");
    }
    impl_->options = std::move(options);
    impl_->setup();
}

ScenarioRunner::~ScenarioRunner() = default;

bool ScenarioRunner::run() { return impl_->run_steps(); }

const std::vector<std::string>& ScenarioRunner::log() const {
    return impl_->log_lines;
}

const chain::GenesisConfig& ScenarioRunner::genesis() const {
    return impl_->genesis;
}

std::shared_ptr<chain::Node> ScenarioRunner::validator() const {
    return impl_->validator_node;
}

std::shared_ptr<chain::Node> ScenarioRunner::observer() const {
    return impl_->observer_node;
}

controller::Controller& ScenarioRunner::ctl() {
    return impl_->ensure_controller();
}

store::ContentStore& ScenarioRunner::content_store() { return *impl_->store; }

KeyPair ScenarioRunner::actor_keys(const std::string& name) const {
    return impl_->actor(name);
}

Address ScenarioRunner::resolve_address(const std::string& ref) const {
    return impl_->resolve(ref);
}

}  // namespace certledger::scenario
