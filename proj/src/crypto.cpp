// Copyright 2026 The bftswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bftswap/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace bftswap {

void ensure_crypto_initialized() {
    static const bool initialized = [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
        return true;
    }();
    (void)initialized;
}

Digest sha256(ByteSpan data) {
    ensure_crypto_initialized();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

std::string short_hex(const Digest& d) { return to_hex(ByteSpan(d.data(), 4)); }

KeyPair KeyPair::from_seed(const Seed& seed) {
    ensure_crypto_initialized();
    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key_.data(), kp.secret_key_.data(), seed.data());
    return kp;
}

KeyPair KeyPair::derive(std::string_view label) {
    std::string tagged = "bftswap/key/";
    tagged.append(label);
    return from_seed(sha256(ByteSpan(reinterpret_cast<const std::uint8_t*>(tagged.data()), tagged.size())));
}

Signature KeyPair::sign(ByteSpan message) const {
    Signature sig{};
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key_.data());
    return sig;
}

bool verify_signature(const PublicKey& key, ByteSpan message, const Signature& sig) {
    ensure_crypto_initialized();
    thread_local std::unordered_set<Digest, DigestHash> verified;

    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, key.data(), key.size());
    crypto_hash_sha256_update(&st, sig.data(), sig.size());
    crypto_hash_sha256_update(&st, message.data(), message.size());
    Digest memo{};
    crypto_hash_sha256_final(&st, memo.data());

    if (verified.contains(memo)) return true;
    if (crypto_sign_verify_detached(sig.data(), message.data(), message.size(), key.data()) != 0) {
        return false;
    }
    if (verified.size() > (1u << 20)) verified.clear();
    verified.insert(memo);
    return true;
}

SeededRng::SeededRng(std::uint64_t seed) : seed_{} {
    Encoder e;
    e.raw(ByteSpan(reinterpret_cast<const std::uint8_t*>("bftswap/rng"), 11));
    e.u64(seed);
    seed_ = sha256(e.data());
}

void SeededRng::fill(std::span<std::uint8_t> out) {
    ensure_crypto_initialized();
    Encoder e;
    e.raw(seed_);
    e.u64(counter_++);
    auto block_seed = sha256(e.data());
    randombytes_buf_deterministic(out.data(), out.size(), block_seed.data());
}

Seed SeededRng::next_seed() {
    Seed s{};
    fill(s);
    return s;
}

std::uint64_t SeededRng::next_u64() {
    std::array<std::uint8_t, 8> b{};
    fill(b);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

}  // namespace bftswap
