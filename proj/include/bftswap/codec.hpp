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

/**
 * @file codec.hpp
 *
 * Canonical binary encoding for every protocol value. Everything that is
 * signed, hashed, traced or stored goes through here, so the layout is
 * frozen (see docs/encoding.md):
 *
 *   - integers: fixed-width little-endian (u8, u32, u64, i64 two's complement)
 *   - bool and enums: one byte
 *   - fixed-size byte arrays: raw, no prefix
 *   - byte strings and text: u32 length, then the bytes
 *   - lists: u32 element count, then each element
 *   - optional: one tag byte (0 absent, 1 present), then the value
 *   - variant: one tag byte (alternative index), then the alternative
 *   - records: fields in declaration order, no framing
 *
 * Records opt in with BFTSWAP_FIELDS(...), which exposes their members as a
 * tuple of references.
 */
#pragma once

#include "bftswap/result.hpp"

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

namespace bftswap {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

#define BFTSWAP_FIELDS(...)                                        \
    auto fields() const { return std::tie(__VA_ARGS__); }          \
    auto fields() { return std::tie(__VA_ARGS__); }

class Encoder {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u64(std::uint64_t v) { put_le(v, 8); }
    void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
    void raw(ByteSpan data) { out_.insert(out_.end(), data.begin(), data.end()); }
    void bytes(ByteSpan data);
    void length(std::size_t n);

    const Bytes& data() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    void put_le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    Bytes out_;
};

class Decoder {
public:
    explicit Decoder(ByteSpan input) : in_(input) {}

    std::uint8_t u8();
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64() { return get_le(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get_le(8)); }
    void raw(std::span<std::uint8_t> out);
    Bytes bytes();
    // Reads a list/string length and checks that at least `min_element_size`
    // bytes per element remain, so corrupt input cannot force huge allocations.
    std::size_t length(std::size_t min_element_size = 1);

    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return pos_ == in_.size(); }
    void expect_done() const;

private:
    std::uint64_t get_le(int width);
    void need(std::size_t n) const;

    ByteSpan in_;
    std::size_t pos_ = 0;
};

namespace codec_detail {

template <typename T>
struct is_vector : std::false_type {};
template <typename T, typename A>
struct is_vector<std::vector<T, A>> : std::true_type {};

template <typename T>
struct is_optional : std::false_type {};
template <typename T>
struct is_optional<std::optional<T>> : std::true_type {};

template <typename T>
struct is_variant : std::false_type {};
template <typename... Ts>
struct is_variant<std::variant<Ts...>> : std::true_type {};

template <typename T>
struct is_byte_array : std::false_type {};
template <std::size_t N>
struct is_byte_array<std::array<std::uint8_t, N>> : std::true_type {};

template <typename T>
struct is_std_array : std::false_type {};
template <typename T, std::size_t N>
struct is_std_array<std::array<T, N>> : std::true_type {};

template <typename T>
struct is_map : std::false_type {};
template <typename K, typename V, typename C, typename A>
struct is_map<std::map<K, V, C, A>> : std::true_type {};

template <typename T>
struct is_pair : std::false_type {};
template <typename A, typename B>
struct is_pair<std::pair<A, B>> : std::true_type {};

}  // namespace codec_detail

template <typename T>
concept Record = requires(const T& t) { t.fields(); };

template <typename T>
void encode(Encoder& e, const T& v);
template <typename T>
void decode(Decoder& d, T& v);

namespace codec_detail {

template <typename Variant, std::size_t I = 0>
void decode_alternative(Decoder& d, Variant& v, std::size_t index) {
    if constexpr (I < std::variant_size_v<Variant>) {
        if (index == I) {
            std::variant_alternative_t<I, Variant> alt{};
            decode(d, alt);
            v = std::move(alt);
            return;
        }
        decode_alternative<Variant, I + 1>(d, v, index);
    } else {
        throw DecodeError("variant tag out of range");
    }
}

}  // namespace codec_detail

template <typename T>
void encode(Encoder& e, const T& v) {
    using namespace codec_detail;
    if constexpr (std::is_same_v<T, bool>) {
        e.u8(v ? 1 : 0);
    } else if constexpr (std::is_enum_v<T>) {
        static_assert(sizeof(T) == 1, "enums encode as a single byte");
        e.u8(static_cast<std::uint8_t>(v));
    } else if constexpr (std::is_same_v<T, std::uint8_t>) {
        e.u8(v);
    } else if constexpr (std::is_same_v<T, std::uint32_t>) {
        e.u32(v);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        e.u64(v);
    } else if constexpr (std::is_same_v<T, std::int64_t>) {
        e.i64(v);
    } else if constexpr (is_byte_array<T>::value) {
        e.raw(v);
    } else if constexpr (std::is_same_v<T, Bytes>) {
        e.bytes(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
        e.bytes(ByteSpan(reinterpret_cast<const std::uint8_t*>(v.data()), v.size()));
    } else if constexpr (is_std_array<T>::value) {
        for (const auto& x : v) encode(e, x);
    } else if constexpr (is_vector<T>::value) {
        e.length(v.size());
        for (const auto& x : v) encode(e, x);
    } else if constexpr (is_map<T>::value) {
        e.length(v.size());
        for (const auto& [k, x] : v) {
            encode(e, k);
            encode(e, x);
        }
    } else if constexpr (is_pair<T>::value) {
        encode(e, v.first);
        encode(e, v.second);
    } else if constexpr (is_optional<T>::value) {
        e.u8(v.has_value() ? 1 : 0);
        if (v) encode(e, *v);
    } else if constexpr (is_variant<T>::value) {
        e.u8(static_cast<std::uint8_t>(v.index()));
        std::visit([&](const auto& alt) { encode(e, alt); }, v);
    } else if constexpr (Record<T>) {
        std::apply([&](const auto&... f) { (encode(e, f), ...); }, v.fields());
    } else {
        static_assert(sizeof(T) == 0, "type has no canonical encoding");
    }
}

template <typename T>
void decode(Decoder& d, T& v) {
    using namespace codec_detail;
    if constexpr (std::is_same_v<T, bool>) {
        auto b = d.u8();
        if (b > 1) throw DecodeError("bool out of range");
        v = b == 1;
    } else if constexpr (std::is_enum_v<T>) {
        static_assert(sizeof(T) == 1, "enums encode as a single byte");
        v = static_cast<T>(d.u8());
    } else if constexpr (std::is_same_v<T, std::uint8_t>) {
        v = d.u8();
    } else if constexpr (std::is_same_v<T, std::uint32_t>) {
        v = d.u32();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        v = d.u64();
    } else if constexpr (std::is_same_v<T, std::int64_t>) {
        v = d.i64();
    } else if constexpr (is_byte_array<T>::value) {
        d.raw(v);
    } else if constexpr (std::is_same_v<T, Bytes>) {
        v = d.bytes();
    } else if constexpr (std::is_same_v<T, std::string>) {
        auto b = d.bytes();
        v.assign(b.begin(), b.end());
    } else if constexpr (is_std_array<T>::value) {
        for (auto& x : v) decode(d, x);
    } else if constexpr (is_vector<T>::value) {
        auto n = d.length();
        v.clear();
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            typename T::value_type x{};
            decode(d, x);
            v.push_back(std::move(x));
        }
    } else if constexpr (is_map<T>::value) {
        auto n = d.length();
        v.clear();
        for (std::size_t i = 0; i < n; ++i) {
            typename T::key_type k{};
            typename T::mapped_type x{};
            decode(d, k);
            decode(d, x);
            if (!v.empty() && !(v.rbegin()->first < k)) {
                throw DecodeError("map keys not strictly increasing");
            }
            v.emplace_hint(v.end(), std::move(k), std::move(x));
        }
    } else if constexpr (is_pair<T>::value) {
        decode(d, v.first);
        decode(d, v.second);
    } else if constexpr (is_optional<T>::value) {
        auto tag = d.u8();
        if (tag == 0) {
            v.reset();
        } else if (tag == 1) {
            typename T::value_type x{};
            decode(d, x);
            v = std::move(x);
        } else {
            throw DecodeError("optional tag out of range");
        }
    } else if constexpr (is_variant<T>::value) {
        decode_alternative(d, v, d.u8());
    } else if constexpr (Record<T>) {
        std::apply([&](auto&... f) { (decode(d, f), ...); }, v.fields());
    } else {
        static_assert(sizeof(T) == 0, "type has no canonical encoding");
    }
}

template <typename T>
Bytes to_bytes(const T& value) {
    Encoder e;
    encode(e, value);
    return e.take();
}

// Decodes a complete value; trailing bytes are an error.
template <typename T>
T from_bytes(ByteSpan data) {
    Decoder d(data);
    T value{};
    decode(d, value);
    d.expect_done();
    return value;
}

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);

}  // namespace bftswap
