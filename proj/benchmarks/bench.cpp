// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>

#include "certledger/chain.hpp"
#include "certledger/controller.hpp"
#include "certledger/crypto.hpp"
#include "certledger/mud.hpp"

namespace {

using namespace certledger;

std::string fixture_text() {
    std::ifstream in(CERTLEDGER_FIXTURE_DIR "/listing3.json");
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void BM_Sha256_1KiB(benchmark::State& state) {
    std::vector<std::uint8_t> data(1024, 0x5a);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sha256(data));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            1024);
}
BENCHMARK(BM_Sha256_1KiB);

void BM_SignTransaction(benchmark::State& state) {
    auto kp = keypair_from_seed(sha256("bench"));
    Address to = kp.address();
    std::uint64_t nonce = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(chain::make_transaction(
            kp, chain::Transfer{to, 1}, nonce++, 1));
    }
}
BENCHMARK(BM_SignTransaction);

void BM_VerifyTransaction(benchmark::State& state) {
    auto kp = keypair_from_seed(sha256("bench"));
    auto tx = chain::make_transaction(kp, chain::Transfer{kp.address(), 1}, 0, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(chain::verify_transaction_signature(tx));
    }
}
BENCHMARK(BM_VerifyTransaction);

void BM_MineBlock(benchmark::State& state) {
    const auto difficulty = static_cast<unsigned>(state.range(0));
    std::uint64_t height = 0;
    for (auto _ : state) {
        chain::Block block;
        block.height = ++height;  // vary the header between iterations
        block.miner = Address{};
        block.timestamp = static_cast<std::int64_t>(height);
        benchmark::DoNotOptimize(chain::mine(std::move(block), difficulty));
    }
}
BENCHMARK(BM_MineBlock)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_MudParse(benchmark::State& state) {
    const std::string text = fixture_text();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mud::parse(std::string_view(text)));
    }
}
BENCHMARK(BM_MudParse);

void BM_MudCompile(benchmark::State& state) {
    auto m = mud::parse(std::string_view(fixture_text()));
    mud::Inventory inventory;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 64; ++i) {
        Address a;
        for (auto& b : a.bytes) b = static_cast<std::uint8_t>(rng());
        inventory[a] = i % 2 == 0 ? "manufacturerA" : "manufacturerB";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(mud::compile(m, inventory));
    }
}
BENCHMARK(BM_MudCompile);

void BM_Filter(benchmark::State& state) {
    auto m = mud::parse(std::string_view(fixture_text()));
    Address device;
    device.bytes.fill(0xd1);
    Address peer;
    peer.bytes.fill(0xb2);
    controller::DeviceRecord record;
    record.device = device;
    record.status = controller::DeviceStatus::Onboarded;
    record.rules = mud::compile(m, {{peer, "manufacturerA"}});

    controller::PacketFlow flow{device, peer, 17, 12, 33};
    for (auto _ : state) {
        benchmark::DoNotOptimize(controller::filter(record, flow));
    }
}
BENCHMARK(BM_Filter);

}  // namespace

BENCHMARK_MAIN();
