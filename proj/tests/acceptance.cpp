// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Acceptance suite: end-to-end checks of the whole platform at desk scale.
// Each criterion prints one PASS/FAIL line; the binary exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "certledger/audit.hpp"
#include "certledger/chain_io.hpp"
#include "certledger/scenario.hpp"
#include "fig3_support.hpp"

using namespace certledger;
using certledger::test::Fig3Fixture;
using certledger::test::Harness;
using certledger::test::test_keys;

namespace {

struct Failure {
    std::string detail;
};

class Check {
  public:
    void expect(bool ok, const std::string& detail) {
        if (!ok) failures_.push_back(detail);
    }

    void expect_eq(std::uint64_t got, std::uint64_t want,
                   const std::string& what) {
        if (got != want) {
            failures_.push_back(what + ": got " + std::to_string(got) +
                                ", want " + std::to_string(want));
        }
    }

    std::string summary() const {
        std::string out;
        for (const auto& f : failures_) {
            if (!out.empty()) out += "; ";
            out += f;
        }
        return out;
    }

    bool ok() const { return failures_.empty(); }

  private:
    std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

// ---------------------------------------------------------------- 1
std::string criterion_listing3_fidelity() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    auto m = mud::parse(std::string_view(
        test::read_text(test::fixture_path("listing3.json"))));
    c.expect(m.mud_version == 1, "mud-version != 1");
    c.expect(m.cache_validity == 48, "cache-validity != 48");
    c.expect(m.mfg_name == "manufacturerA", "mfg-name mismatch");
    c.expect(m.from_device_policy ==
                 std::vector<std::string>{"mud-37547-v6fr"},
             "from-device policy mismatch");
    c.expect(m.to_device_policy == std::vector<std::string>{"mud-37547-v6to"},
             "to-device policy mismatch");
    c.expect(!m.acls.empty() && m.acls[0].aces.size() == 1, "ace count");
    if (!m.acls.empty() && !m.acls[0].aces.empty()) {
        const auto& ace = m.acls[0].aces[0];
        c.expect(ace.protocol == 17, "protocol != 17");
        c.expect(ace.l4 && ace.l4->destination_port &&
                     ace.l4->destination_port->port == 33,
                 "destination port != 33");
        c.expect(ace.l4 && ace.l4->source_port &&
                     ace.l4->source_port->port == 12,
                 "source port != 12");
    }
    c.expect(mud::validate(m).empty(), "fixture has validation violations");
    c.expect(seconds_since(start) < 1.0, "runtime exceeded 1 s");
    return c.summary();
}

// ---------------------------------------------------------------- 2
std::string criterion_fig3_end_to_end() {
    Check c;
    const auto start = std::chrono::steady_clock::now();

    scenario::ScenarioRunner::Options options;
    options.base_dir = test::fixture_path("");
    options.store_dir = std::filesystem::temp_directory_path() /
                        "certledger-acceptance-fig3";
    std::filesystem::remove_all(options.store_dir);
    scenario::ScenarioRunner runner(
        test::read_text(test::fixture_path("fig3.json")), options);
    c.expect(runner.run(), "scenario reported a failed step");

    std::vector<nlohmann::json> log;
    for (const auto& line : runner.log()) log.push_back(nlohmann::json::parse(line));
    c.expect_eq(log.size(), 13, "step count");
    if (log.size() == 13) {
        c.expect(log[9]["result"] == "onboarded", "device not onboarded");
        c.expect(log[9]["installed-rules"] == 2, "rule count != 2");
        c.expect(log[10]["decision"] == "allow",
                 "same-manufacturer UDP 12->33 not allowed");
        c.expect(log[11]["decision"] == "deny",
                 "cross-manufacturer flow not denied");
        c.expect(log[12]["decision"] == "deny", "TCP variant not denied");
    }
    c.expect(seconds_since(start) < 5.0, "runtime exceeded 5 s");
    return c.summary();
}

// ---------------------------------------------------------------- 3
std::string criterion_authorization_matrix() {
    Check c;
    auto manufacturer = test_keys(1);
    auto cab = test_keys(2);
    auto stranger = test_keys(3);
    Harness h({manufacturer, cab, stranger}, 1000);
    auto mfg_auth = h.deploy_authority(manufacturer, "ManufacturerA");
    auto cab_auth = h.deploy_authority(cab, "CAB-Italy");
    auto reg = h.deploy_registry(manufacturer, "ManufacturerA", mfg_auth,
                                 "temp-sensor-model1");

    Digest hash = sha256("payload");
    auto register_call = registry::RegistryCall{registry::RegisterFile{
        "MUD", "store://x",
        std::vector<std::uint8_t>(hash.begin(), hash.end())}};
    auto set_body_call = registry::RegistryCall{registry::SetAssessmentBody{
        cab.address(), "CAB-Italy", cab_auth}};

    auto run = [&](const KeyPair& sender, const chain::ContractCall& call,
                   std::optional<TxErrorCode> want_error,
                   const std::string& label) {
        auto r = h.call(sender, reg, call);
        if (!want_error) {
            c.expect(r.ok, label + ": expected success");
        } else {
            c.expect(!r.ok && r.error && r.error->code == *want_error,
                     label + ": expected " +
                         std::string(to_string(*want_error)));
        }
    };

    // Phase A: the constructor makes the manufacturer its own assessor.
    run(manufacturer, register_call, std::nullopt, "A register/manufacturer");
    run(cab, register_call, TxErrorCode::NotAuthorized, "A register/cab");
    run(stranger, register_call, TxErrorCode::NotAuthorized,
        "A register/stranger");

    // Designation is manufacturer-only.
    run(cab, set_body_call, TxErrorCode::NotManufacturer, "set-body/cab");
    run(stranger, set_body_call, TxErrorCode::NotManufacturer,
        "set-body/stranger");
    run(manufacturer, set_body_call, std::nullopt, "set-body/manufacturer");

    // Phase B: manufacturer OR designated body may register.
    run(manufacturer, register_call, std::nullopt, "B register/manufacturer");
    run(cab, register_call, std::nullopt, "B register/cab");
    run(stranger, register_call, TxErrorCode::NotAuthorized,
        "B register/stranger");

    // Identity: 4 cases.
    auto issue = identity::AuthorityCall{
        identity::IssueCertificate{"S", "cert"}};
    auto revoke = identity::AuthorityCall{identity::RevokeCertificate{"S"}};
    auto id_run = [&](const KeyPair& sender,
                      const identity::AuthorityCall& call, bool want_ok,
                      const std::string& label) {
        auto r = h.call(sender, mfg_auth, chain::ContractCall{call});
        if (want_ok) {
            c.expect(r.ok, label + ": expected success");
        } else {
            c.expect(!r.ok && r.error &&
                         r.error->code == TxErrorCode::NotOwner,
                     label + ": expected NotOwner");
        }
    };
    id_run(manufacturer, issue, true, "issue/owner");
    id_run(stranger, issue, false, "issue/stranger");
    id_run(manufacturer, revoke, true, "revoke/owner");
    id_run(stranger, revoke, false, "revoke/stranger");

    return c.summary();
}

// ---------------------------------------------------------------- 4
std::string criterion_chain_invariants() {
    Check c;
    const auto start = std::chrono::steady_clock::now();

    std::vector<KeyPair> accounts;
    for (int i = 0; i < 20; ++i) accounts.push_back(test_keys(200 + i));
    Harness h(accounts, /*fund=*/1000, /*difficulty=*/8);
    const chain::Amount genesis_total = h.genesis.total_allocation();

    // 500 valid-by-construction random transfers, 25 per block.
    std::mt19937_64 rng(4242);
    int mined_txs = 0;
    std::map<Address, std::uint64_t> nonces;
    while (mined_txs < 500) {
        int batch = 0;
        auto state = h.validator->state();
        std::map<Address, chain::Amount> balances;
        for (const auto& kp : accounts) {
            balances[kp.address()] = state.balance(kp.address());
        }
        while (batch < 25 && mined_txs + batch < 500) {
            const auto& from = accounts[rng() % accounts.size()];
            const auto& to = accounts[rng() % accounts.size()];
            chain::Amount spendable = balances[from.address()];
            if (spendable <= h.genesis.fee) continue;
            const chain::Amount amount =
                rng() % (spendable - h.genesis.fee + 1);
            auto tx = chain::make_transaction(
                from, chain::Transfer{to.address(), amount},
                nonces[from.address()], h.genesis.fee);
            auto submitted = h.validator->submit(tx);
            if (!submitted.accepted) {
                c.expect(false, "generator produced a rejected transaction");
                return c.summary();
            }
            nonces[from.address()] += 1;
            // Debit-only within a batch: credits settle when the block is
            // mined, matching mempool admission against the head state.
            balances[from.address()] -= amount + h.genesis.fee;
            ++batch;
        }
        h.validator->mine_and_announce();
        mined_txs += batch;
    }

    auto blocks = h.validator->canonical_chain();
    auto live = h.validator->state();

    std::size_t total_txs = 0;
    for (const auto& b : blocks) total_txs += b.transactions.size();
    c.expect_eq(total_txs, 500, "mined transaction count");

    // Replay determinism.
    auto replayed = chain::replay(
        h.genesis,
        std::span<const chain::Block>(blocks.data() + 1, blocks.size() - 1));
    c.expect(replayed.state.has_value(), "replay failed");
    if (replayed.state) {
        c.expect(*replayed.state == live, "replay diverges from live state");
    }

    // Conservation: genesis + reward (2) x height.
    c.expect_eq(live.total_balance(),
                genesis_total + h.genesis.reward * h.validator->height(),
                "conservation");

    // Nonce monotonicity per sender across the whole chain.
    std::map<Address, std::uint64_t> seen;
    bool monotone = true;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        for (const auto& tx : blocks[i].transactions) {
            auto it = seen.find(tx.sender);
            const std::uint64_t expected =
                it == seen.end() ? 0 : it->second + 1;
            if (tx.nonce != expected) monotone = false;
            seen[tx.sender] = tx.nonce;
        }
    }
    c.expect(monotone, "nonce monotonicity violated");

    // Full-chain revalidation must fail after a single-byte tamper of the
    // persisted chain file; five independent positions.
    const auto dir =
        std::filesystem::temp_directory_path() / "certledger-acceptance-tamper";
    std::filesystem::create_directories(dir);
    const auto path = dir / "chain.ndjson";
    chain::save_chain(path, blocks);
    auto pristine = test::read_file(path);
    for (int trial = 0; trial < 5; ++trial) {
        auto bytes = pristine;
        const std::size_t index =
            1 + (rng() % (bytes.size() - 2));  // keep final newline intact
        bytes[index] ^= 0x01;
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        }
        bool failed = false;
        try {
            auto reloaded = chain::load_chain(path);
            chain::replay_chain_file(h.genesis, reloaded);
        } catch (const chain::IoError&) {
            failed = true;
        }
        c.expect(failed, "tamper at byte " + std::to_string(index) +
                             " went undetected");
    }

    c.expect(seconds_since(start) < 30.0, "runtime exceeded 30 s");
    return c.summary();
}

// ---------------------------------------------------------------- 5
std::string criterion_pow_statistics() {
    Check c;
    Harness h({test_keys(1)}, 100, /*difficulty=*/8);
    std::uint64_t attempts = 0;
    for (int i = 0; i < 100; ++i) {
        attempts += h.validator->mine_and_announce().attempts;
    }
    const double mean = static_cast<double>(attempts) / 100.0;
    // Geometric-distribution oracle: success probability 2^-8, mean 256.
    c.expect(mean >= 128.0 && mean <= 512.0,
             "mean attempts " + std::to_string(mean) + " outside [128, 512]");
    return c.summary();
}

// ---------------------------------------------------------------- 6
std::string criterion_tamper_evidence() {
    Check c;
    Fig3Fixture f("acceptance-tamper");
    f.tamper_stored_mud();
    auto result = f.ctl->onboard(f.onboard_request());
    c.expect(result.status == controller::DeviceStatus::Quarantined,
             "device not quarantined");
    c.expect(result.error &&
                 result.error->kind == controller::OnboardFailure::HashMismatch,
             "failure is not HashMismatch");
    c.expect_eq(result.installed_rules, 0, "installed rules");
    auto record = f.ctl->record(f.device.address());
    c.expect(record && record->rules.empty(), "record carries rules");
    return c.summary();
}

// ---------------------------------------------------------------- 7
std::string criterion_filter_oracle() {
    Check c;
    Fig3Fixture f("acceptance-oracle");
    auto onboarded = f.ctl->onboard(f.onboard_request());
    c.expect(onboarded.status == controller::DeviceStatus::Onboarded,
             "onboarding failed");
    const Address dev = f.device.address();

    int flows = 0;
    int agreements = 0;
    for (const Address& peer : {f.dev_b, f.dev_c}) {
        for (bool from_device : {true, false}) {
            for (int protocol : {6, 17}) {
                for (int sp : {12, 33, 80}) {
                    for (int dp : {12, 33, 80}) {
                        controller::PacketFlow flow;
                        flow.src = from_device ? dev : peer;
                        flow.dst = from_device ? peer : dev;
                        flow.protocol = protocol;
                        flow.src_port = sp;
                        flow.dst_port = dp;
                        const bool expected = certledger::test::naive_fig3_allow(
                            flow, dev, f.ctl->inventory());
                        const bool actual = f.ctl->filter_flow(dev, flow).allow;
                        ++flows;
                        if (expected == actual) ++agreements;
                    }
                }
            }
        }
    }
    c.expect(flows <= 200, "flow space larger than 200");
    c.expect_eq(agreements, flows, "filter/oracle agreement");
    return c.summary();
}

// ---------------------------------------------------------------- 8
std::string criterion_revocation_propagation() {
    Check c;
    Fig3Fixture f("acceptance-revoke");
    f.h.call(f.spain, f.spain_auth,
             identity::AuthorityCall{
                 identity::RevokeCertificate{"ManufacturerA"}});
    auto result = f.ctl->onboard(f.onboard_request());
    c.expect(result.status == controller::DeviceStatus::Quarantined,
             "device not quarantined");
    c.expect(result.error &&
                 result.error->kind == controller::OnboardFailure::ChainInvalid,
             "failure is not ChainInvalid");
    return c.summary();
}

// ---------------------------------------------------------------- 9
std::string criterion_unlinkability() {
    Check c;
    auto mfg_a = test_keys(1);
    auto mfg_b = test_keys(2);
    Harness h({mfg_a, mfg_b}, 1000);
    auto auth_a = h.deploy_authority(mfg_a, "ManufacturerA");
    auto auth_b = h.deploy_authority(mfg_b, "ManufacturerB");

    // One physical consumer registering one device with each manufacturer.
    auto reg1 = identity::make_anonymous_consumer("model-1");
    auto reg2 = identity::make_anonymous_consumer("model-2");
    h.call(mfg_a, auth_a, identity::AuthorityCall{reg1.call});
    h.call(mfg_b, auth_b, identity::AuthorityCall{reg2.call});

    auto state = h.state();
    const auto& e1 = state.authority(auth_a)->issued.at(0);
    const auto& e2 = state.authority(auth_b)->issued.at(0);

    auto identifying_fields = [&c](const identity::CertificateIssued& e) {
        std::set<std::string> out;
        out.insert(e.subject_name);
        auto cert = identity::SubjectCertificate::decode(e.subject_certificate);
        c.expect(cert.has_value(), "credential does not decode");
        if (cert) {
            out.insert(to_hex(cert->subject_address));
            out.insert(to_hex(cert->subject_public_key));
            out.insert(cert->metadata);
        }
        return out;
    };
    auto f1 = identifying_fields(e1);
    auto f2 = identifying_fields(e2);
    for (const auto& value : f1) {
        c.expect(!f2.contains(value), "shared join key: " + value);
    }
    auto cert1 = identity::SubjectCertificate::decode(e1.subject_certificate);
    c.expect(cert1 && cert1->role == identity::Role::VerifiedConsumer,
             "role is not verified-consumer");
    return c.summary();
}

// ---------------------------------------------------------------- 10
std::string criterion_disclosure_workflow() {
    Check c;
    using vulndisc::Status;

    auto manufacturer = test_keys(1);
    auto finder = test_keys(2);

    struct Probe {
        Harness h;
        Address reg;
        KeyPair manufacturer;
        KeyPair finder;

        Probe(const KeyPair& mfg, const KeyPair& fnd, std::uint64_t embargo)
            : h({mfg, fnd}, 1000, 8, embargo),
              manufacturer(mfg),
              finder(fnd) {
            auto auth = h.deploy_authority(manufacturer, "M");
            reg = h.deploy_registry(manufacturer, "M", auth, "widget");
        }

        Digest disclose() {
            auto package = vulndisc::prepare_disclosure(
                manufacturer.public_key,
                std::vector<std::uint8_t>{1, 2, 3, 4});
            auto location = "store://" + to_hex(package->ciphertext_hash).substr(2);
            h.call(finder, reg,
                   registry::RegistryCall{registry::Disclose{
                       location, package->ciphertext_hash}});
            return vulndisc::disclosure_id(reg, finder.address(), location,
                                           package->ciphertext_hash);
        }

        test::Harness::TxResult attempt(const Digest& id, Status target) {
            if (target == Status::Published) {
                return h.call(manufacturer, reg,
                              registry::RegistryCall{
                                  registry::PublishDisclosure{id}});
            }
            return h.call(manufacturer, reg,
                          registry::RegistryCall{
                              registry::UpdateDisclosure{id, target}});
        }

        // Walks a fresh disclosure to the requested starting status.
        Digest at_status(Status s) {
            Digest id = disclose();
            if (s == Status::Disclosed) return id;
            attempt(id, Status::Acknowledged);
            if (s == Status::Acknowledged) return id;
            attempt(id, Status::Remediated);
            if (s == Status::Remediated) return id;
            attempt(id, Status::Published);
            return id;
        }
    };

    // The full 12-case matrix under an active embargo: from each of the four
    // states, request each of the three targets. Exactly three edges are
    // legal; every other case must be rejected with its precise code.
    Probe probe(manufacturer, finder, /*embargo=*/100000);
    const Status froms[] = {Status::Disclosed, Status::Acknowledged,
                            Status::Remediated, Status::Published};
    const Status targets[] = {Status::Acknowledged, Status::Remediated,
                              Status::Published};
    int cases = 0;
    for (Status from : froms) {
        for (Status target : targets) {
            Digest id = probe.at_status(from);
            auto r = probe.attempt(id, target);
            ++cases;
            const std::string label =
                std::string(vulndisc::to_string(from)) + "->" +
                std::string(vulndisc::to_string(target));
            const bool legal = (from == Status::Disclosed &&
                                target == Status::Acknowledged) ||
                               (from == Status::Acknowledged &&
                                target == Status::Remediated) ||
                               (from == Status::Remediated &&
                                target == Status::Published);
            if (legal) {
                c.expect(r.ok, label + ": legal edge rejected");
            } else {
                c.expect(!r.ok, label + ": off-path transition accepted");
                if (r.error) {
                    const bool embargo_case = target == Status::Published &&
                                              (from == Status::Disclosed ||
                                               from == Status::Acknowledged);
                    c.expect(r.error->code ==
                                 (embargo_case ? TxErrorCode::EmbargoActive
                                               : TxErrorCode::IllegalTransition),
                             label + ": wrong rejection code");
                }
            }
        }
    }
    c.expect_eq(cases, 12, "matrix size");

    // Embargo boundary: a publish landing exactly at disclosed-at + embargo
    // succeeds; one block earlier it is rejected.
    Probe boundary(manufacturer, finder, /*embargo=*/4);
    Digest id = boundary.disclose();
    auto state = boundary.h.state();
    const auto* reg_state = state.registry_at(boundary.reg);
    const std::uint64_t disclosed_at =
        reg_state->disclosures.at(id).disclosed_at;
    while (boundary.h.validator->height() + 1 < disclosed_at + 3) {
        boundary.h.validator->mine_and_announce();
    }
    auto early = boundary.h.call(finder, boundary.reg,
                                 registry::RegistryCall{
                                     registry::PublishDisclosure{id}});
    c.expect(!early.ok && early.error &&
                 early.error->code == TxErrorCode::EmbargoActive,
             "publish one block before the boundary was not rejected");
    boundary.h.validator->mine_and_announce();
    auto at_boundary = boundary.h.call(finder, boundary.reg,
                                       registry::RegistryCall{
                                           registry::PublishDisclosure{id}});
    c.expect(at_boundary.ok, "publish at the boundary was rejected");
    if (at_boundary.ok) {
        auto after = boundary.h.state();
        const auto& d = after.registry_at(boundary.reg)->disclosures.at(id);
        c.expect_eq(d.status_log.back().block_height, disclosed_at + 4,
                    "publication height");
    }
    return c.summary();
}

struct Criterion {
    int id;
    std::string name;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Listing-3 fixture fidelity", criterion_listing3_fidelity},
        {2, "end-to-end onboarding scenario", criterion_fig3_end_to_end},
        {3, "contract authorization matrix", criterion_authorization_matrix},
        {4, "chain invariant suite (500 tx)", criterion_chain_invariants},
        {5, "proof-of-work statistics", criterion_pow_statistics},
        {6, "off-chain tamper evidence", criterion_tamper_evidence},
        {7, "filter vs brute-force oracle", criterion_filter_oracle},
        {8, "revocation propagation", criterion_revocation_propagation},
        {9, "consumer unlinkability", criterion_unlinkability},
        {10, "disclosure workflow", criterion_disclosure_workflow},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        try {
            detail = criterion.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(start);
        if (detail.empty()) {
            std::printf("PASS  criterion %2d  %-36s (%.2f s)\n", criterion.id,
                        criterion.name.c_str(), elapsed);
        } else {
            ++failed;
            std::printf("FAIL  criterion %2d  %-36s (%.2f s): %s\n",
                        criterion.id, criterion.name.c_str(), elapsed,
                        detail.c_str());
        }
    }
    if (failed != 0) {
        std::printf("%d of %zu criteria failed\n", failed, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
