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

#include "bftswap/tpke.hpp"

#include <sodium.h>

#include <map>
#include <string_view>

namespace bftswap::tpke {
namespace {

constexpr Point kIdentity{};

bool valid_point(const Point& p) { return crypto_core_ristretto255_is_valid_point(p.data()) == 1; }

// Group order, little-endian.
constexpr Scalar kOrder{0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58, 0xd6, 0x9c, 0xf7, 0xa2, 0xde, 0xf9, 0xde, 0x14,
                        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10};

// Scalar multiplication ignores the top bit, so proofs must carry reduced
// scalars to be non-malleable.
bool canonical_scalar(const Scalar& s) {
    for (std::size_t i = s.size(); i-- > 0;) {
        if (s[i] != kOrder[i]) return s[i] < kOrder[i];
    }
    return false;
}

Point add(const Point& a, const Point& b) {
    Point out{};
    crypto_core_ristretto255_add(out.data(), a.data(), b.data());
    return out;
}

Point sub(const Point& a, const Point& b) {
    Point out{};
    crypto_core_ristretto255_sub(out.data(), a.data(), b.data());
    return out;
}

// libsodium refuses to output the identity and signals it with -1.
Point mul(const Scalar& s, const Point& p) {
    Point out{};
    if (p == kIdentity || crypto_scalarmult_ristretto255(out.data(), s.data(), p.data()) != 0) {
        return kIdentity;
    }
    return out;
}

Point mul_base(const Scalar& s) {
    Point out{};
    if (crypto_scalarmult_ristretto255_base(out.data(), s.data()) != 0) return kIdentity;
    return out;
}

Scalar scalar_from_u64(std::uint64_t v) {
    Scalar s{};
    for (int i = 0; i < 8; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    return s;
}

Scalar scalar_add(const Scalar& a, const Scalar& b) {
    Scalar out{};
    crypto_core_ristretto255_scalar_add(out.data(), a.data(), b.data());
    return out;
}

Scalar scalar_sub(const Scalar& a, const Scalar& b) {
    Scalar out{};
    crypto_core_ristretto255_scalar_sub(out.data(), a.data(), b.data());
    return out;
}

Scalar scalar_mul(const Scalar& a, const Scalar& b) {
    Scalar out{};
    crypto_core_ristretto255_scalar_mul(out.data(), a.data(), b.data());
    return out;
}

Scalar scalar_invert(const Scalar& a) {
    Scalar out{};
    crypto_core_ristretto255_scalar_invert(out.data(), a.data());
    return out;
}

Scalar random_scalar(SeededRng& rng) {
    std::array<std::uint8_t, 64> wide{};
    rng.fill(wide);
    Scalar s{};
    crypto_core_ristretto255_scalar_reduce(s.data(), wide.data());
    return s;
}

// Fiat-Shamir challenge: SHA-512 over a domain tag and the transcript, reduced.
Scalar hash_to_scalar(std::string_view domain, const Bytes& transcript) {
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    crypto_hash_sha512_update(&st, reinterpret_cast<const unsigned char*>(domain.data()), domain.size());
    crypto_hash_sha512_update(&st, transcript.data(), transcript.size());
    std::array<std::uint8_t, 64> wide{};
    crypto_hash_sha512_final(&st, wide.data());
    Scalar s{};
    crypto_core_ristretto255_scalar_reduce(s.data(), wide.data());
    return s;
}

Scalar encryption_challenge(const Ciphertext& c, const Point& commitment) {
    Encoder e;
    e.bytes(c.label);
    e.raw(c.u);
    e.raw(c.v);
    e.raw(commitment);
    return hash_to_scalar("bftswap/tpke/encrypt", e.data());
}

Scalar share_challenge(const Point& vk_i, const Point& u, const Point& mu, const Point& a1, const Point& a2) {
    Encoder e;
    e.raw(vk_i);
    e.raw(u);
    e.raw(mu);
    e.raw(a1);
    e.raw(a2);
    return hash_to_scalar("bftswap/tpke/share", e.data());
}

Point generator() {
    static const Point g = mul_base(scalar_from_u64(1));
    return g;
}

constexpr std::uint64_t kBabySteps = 1u << 10;

// m*G -> m for m < kBabySteps.
const std::map<Point, std::uint64_t>& baby_steps() {
    static const std::map<Point, std::uint64_t> table = [] {
        std::map<Point, std::uint64_t> t;
        Point acc = kIdentity;
        for (std::uint64_t j = 0; j < kBabySteps; ++j) {
            t.emplace(acc, j);
            acc = add(acc, generator());
        }
        return t;
    }();
    return table;
}

std::optional<std::uint64_t> discrete_log_bounded(const Point& target) {
    const auto& table = baby_steps();
    const Point giant = mul_base(scalar_from_u64(kBabySteps));
    Point cur = target;
    for (std::uint64_t i = 0; i * kBabySteps < kMessageBound; ++i) {
        if (auto it = table.find(cur); it != table.end()) {
            return i * kBabySteps + it->second;
        }
        cur = sub(cur, giant);
    }
    return std::nullopt;
}

}  // namespace

Result<System> setup(std::uint32_t servers, std::uint32_t threshold, SeededRng& rng, std::uint32_t security_bits) {
    ensure_crypto_initialized();
    if (threshold < 1 || threshold > servers) return Error::BadThreshold;
    if (security_bits > kSecurityBits) return Error::BadThreshold;

    // p(z) = a_0 + a_1 z + ... + a_{k-1} z^{k-1}, secret a_0.
    std::vector<Scalar> coeffs;
    coeffs.reserve(threshold);
    for (std::uint32_t i = 0; i < threshold; ++i) coeffs.push_back(random_scalar(rng));

    System sys;
    sys.public_key = PublicKey{mul_base(coeffs[0]), servers, threshold};
    for (std::uint32_t i = 1; i <= servers; ++i) {
        const Scalar x = scalar_from_u64(i);
        Scalar y{};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            y = scalar_add(scalar_mul(y, x), *it);
        }
        sys.key_shares.push_back(KeyShare{i, y});
        sys.verification_key.shares.push_back(mul_base(y));
    }
    return sys;
}

Result<Ciphertext> encrypt(const PublicKey& pk, std::uint64_t message, ByteSpan label, SeededRng& rng) {
    ensure_crypto_initialized();
    if (message >= kMessageBound) return Error::MessageOutOfRange;
    const Scalar r = random_scalar(rng);
    Ciphertext c;
    c.label.assign(label.begin(), label.end());
    c.u = mul_base(r);
    c.v = add(mul_base(scalar_from_u64(message)), mul(r, pk.key));

    const Scalar w = random_scalar(rng);
    const Point commitment = mul_base(w);
    c.challenge = encryption_challenge(c, commitment);
    c.response = scalar_add(w, scalar_mul(c.challenge, r));
    return c;
}

bool is_well_formed(const Ciphertext& c) {
    ensure_crypto_initialized();
    if (!valid_point(c.u) || !valid_point(c.v) || c.u == kIdentity) return false;
    if (!canonical_scalar(c.challenge) || !canonical_scalar(c.response)) return false;
    // A = z*G - e*U must hash back to e.
    const Point commitment = sub(mul_base(c.response), mul(c.challenge, c.u));
    return encryption_challenge(c, commitment) == c.challenge;
}

DecryptionShare share_decrypt(const PublicKey& pk, const KeyShare& key, const Ciphertext& c) {
    (void)pk;
    DecryptionShare out{key.index, std::nullopt};
    if (!is_well_formed(c)) return out;

    ShareProof proof;
    proof.value = mul(key.secret, c.u);

    // Deterministic nonce, so asking twice yields the identical share.
    Encoder nonce_input;
    nonce_input.raw(key.secret);
    encode(nonce_input, c);
    const Scalar w = hash_to_scalar("bftswap/tpke/share-nonce", nonce_input.data());

    const Point vk_i = mul_base(key.secret);
    const Point a1 = mul_base(w);
    const Point a2 = mul(w, c.u);
    proof.challenge = share_challenge(vk_i, c.u, proof.value, a1, a2);
    proof.response = scalar_add(w, scalar_mul(proof.challenge, key.secret));
    out.share = proof;
    return out;
}

bool share_verify(const PublicKey& pk, const VerificationKey& vk, const Ciphertext& c, const DecryptionShare& share) {
    ensure_crypto_initialized();
    if (!share.share) return false;
    if (share.index < 1 || share.index > pk.servers || share.index > vk.shares.size()) return false;
    if (!is_well_formed(c)) return false;
    const auto& proof = *share.share;
    if (!valid_point(proof.value)) return false;
    if (!canonical_scalar(proof.challenge) || !canonical_scalar(proof.response)) return false;
    const Point& vk_i = vk.shares[share.index - 1];
    // a1 = z*G - e*VK_i, a2 = z*U - e*mu
    const Point a1 = sub(mul_base(proof.response), mul(proof.challenge, vk_i));
    const Point a2 = sub(mul(proof.response, c.u), mul(proof.challenge, proof.value));
    return share_challenge(vk_i, c.u, proof.value, a1, a2) == proof.challenge;
}

std::optional<std::uint64_t> combine(const PublicKey& pk, const VerificationKey& vk, const Ciphertext& c,
                                     std::span<const DecryptionShare> shares) {
    std::map<std::uint32_t, Point> valid;
    for (const auto& s : shares) {
        if (valid.contains(s.index)) continue;
        if (!share_verify(pk, vk, c, s)) continue;
        valid.emplace(s.index, s.share->value);
        if (valid.size() == pk.threshold) break;
    }
    if (valid.size() < pk.threshold || pk.threshold == 0) return std::nullopt;

    // x*U = sum_i lambda_i * mu_i with Lagrange coefficients at zero.
    Point xu = kIdentity;
    for (const auto& [i, mu] : valid) {
        Scalar num = scalar_from_u64(1);
        Scalar den = scalar_from_u64(1);
        for (const auto& [j, _] : valid) {
            if (j == i) continue;
            num = scalar_mul(num, scalar_from_u64(j));
            den = scalar_mul(den, scalar_sub(scalar_from_u64(j), scalar_from_u64(i)));
        }
        xu = add(xu, mul(scalar_mul(num, scalar_invert(den)), mu));
    }
    return discrete_log_bounded(sub(c.v, xu));
}

}  // namespace bftswap::tpke
