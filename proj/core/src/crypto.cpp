// Copyright 2026 The certledger Authors. Licensed under the Apache License,
// Version 2.0. See the COPYING file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "certledger/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace certledger {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::size_t DigestHash::operator()(const Digest& d) const noexcept {
    std::size_t h;
    std::memcpy(&h, d.data(), sizeof(h));
    return h;
}

std::size_t AddressHash::operator()(const Address& a) const noexcept {
    std::size_t h;
    std::memcpy(&h, a.bytes.data(), sizeof(h));
    return h;
}

bool Address::is_zero() const {
    for (auto b : bytes) {
        if (b != 0) return false;
    }
    return true;
}

Address KeyPair::address() const {
    return derive_address(public_key);
}

Digest sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest sha256(std::string_view data) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

KeyPair generate_keypair() {
    ensure_sodium();
    KeyPair kp;
    crypto_sign_keypair(kp.public_key.bytes.data(), kp.private_key.bytes.data());
    return kp;
}

KeyPair keypair_from_seed(const Digest& seed) {
    ensure_sodium();
    static_assert(crypto_sign_SEEDBYTES == 32);
    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key.bytes.data(),
                             kp.private_key.bytes.data(), seed.data());
    return kp;
}

Address derive_address(const PublicKey& key) {
    Digest d = sha256(std::span<const std::uint8_t>(key.bytes));
    Address a;
    std::memcpy(a.bytes.data(), d.data() + (d.size() - a.bytes.size()),
                a.bytes.size());
    return a;
}

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> message) {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(),
                         message.size(), key.bytes.data());
    return sig;
}

bool verify(const PublicKey& key, std::span<const std::uint8_t> message,
            const Signature& signature) {
    ensure_sodium();
    return crypto_sign_verify_detached(signature.bytes.data(), message.data(),
                                       message.size(), key.bytes.data()) == 0;
}

std::optional<std::vector<std::uint8_t>> seal_for(
    const PublicKey& recipient, std::span<const std::uint8_t> plaintext) {
    ensure_sodium();
    std::array<std::uint8_t, crypto_scalarmult_curve25519_BYTES> curve_pk;
    if (crypto_sign_ed25519_pk_to_curve25519(curve_pk.data(),
                                             recipient.bytes.data()) != 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> out(crypto_box_SEALBYTES + plaintext.size());
    if (crypto_box_seal(out.data(), plaintext.data(), plaintext.size(),
                        curve_pk.data()) != 0) {
        return std::nullopt;
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> open_sealed(
    const KeyPair& recipient, std::span<const std::uint8_t> ciphertext) {
    ensure_sodium();
    if (ciphertext.size() < crypto_box_SEALBYTES) {
        return std::nullopt;
    }
    std::array<std::uint8_t, crypto_scalarmult_curve25519_BYTES> curve_pk;
    std::array<std::uint8_t, crypto_scalarmult_curve25519_SCALARBYTES> curve_sk;
    if (crypto_sign_ed25519_pk_to_curve25519(
            curve_pk.data(), recipient.public_key.bytes.data()) != 0 ||
        crypto_sign_ed25519_sk_to_curve25519(
            curve_sk.data(), recipient.private_key.bytes.data()) != 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> out(ciphertext.size() - crypto_box_SEALBYTES);
    if (crypto_box_seal_open(out.data(), ciphertext.data(), ciphertext.size(),
                             curve_pk.data(), curve_sk.data()) != 0) {
        return std::nullopt;
    }
    return out;
}

std::vector<std::uint8_t> random_bytes(std::size_t n) {
    ensure_sodium();
    std::vector<std::uint8_t> out(n);
    randombytes_buf(out.data(), out.size());
    return out;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(2 + 2 * data.size());
    out += "0x";
    for (auto b : data) {
        out += kHexDigits[b >> 4];
        out += kHexDigits[b & 0x0f];
    }
    return out;
}

std::string to_hex(const Digest& d) {
    return to_hex(std::span<const std::uint8_t>(d));
}

std::string to_hex(const Address& a) {
    return to_hex(std::span<const std::uint8_t>(a.bytes));
}

std::string to_hex(const PublicKey& k) {
    return to_hex(std::span<const std::uint8_t>(k.bytes));
}

std::string to_hex(const PrivateKey& k) {
    return to_hex(std::span<const std::uint8_t>(k.bytes));
}

std::string to_hex(const Signature& s) {
    return to_hex(std::span<const std::uint8_t>(s.bytes));
}

std::optional<std::vector<std::uint8_t>> bytes_from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) {
        hex.remove_prefix(2);
    }
    if (hex.size() % 2 != 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            return std::nullopt;
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes || bytes->size() != 32) return std::nullopt;
    Digest d;
    std::memcpy(d.data(), bytes->data(), d.size());
    return d;
}

std::optional<Address> address_from_hex(std::string_view hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes || bytes->size() != 20) return std::nullopt;
    Address a;
    std::memcpy(a.bytes.data(), bytes->data(), a.bytes.size());
    return a;
}

std::optional<PublicKey> public_key_from_hex(std::string_view hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes || bytes->size() != 32) return std::nullopt;
    PublicKey k;
    std::memcpy(k.bytes.data(), bytes->data(), k.bytes.size());
    return k;
}

std::optional<PrivateKey> private_key_from_hex(std::string_view hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes || bytes->size() != 64) return std::nullopt;
    PrivateKey k;
    std::memcpy(k.bytes.data(), bytes->data(), k.bytes.size());
    return k;
}

std::optional<Signature> signature_from_hex(std::string_view hex) {
    auto bytes = bytes_from_hex(hex);
    if (!bytes || bytes->size() != 64) return std::nullopt;
    Signature s;
    std::memcpy(s.bytes.data(), bytes->data(), s.bytes.size());
    return s;
}

}  // namespace certledger
