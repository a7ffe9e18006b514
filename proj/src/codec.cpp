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

#include "bftswap/codec.hpp"

#include <algorithm>
#include <limits>

namespace bftswap {

void Encoder::length(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("canonical length exceeds u32");
    }
    u32(static_cast<std::uint32_t>(n));
}

void Encoder::bytes(ByteSpan data) {
    length(data.size());
    raw(data);
}

void Decoder::need(std::size_t n) const {
    if (remaining() < n) {
        throw DecodeError("unexpected end of input");
    }
}

std::uint8_t Decoder::u8() {
    need(1);
    return in_[pos_++];
}

std::uint64_t Decoder::get_le(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
        v |= static_cast<std::uint64_t>(in_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
}

void Decoder::raw(std::span<std::uint8_t> out) {
    need(out.size());
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
    pos_ += out.size();
}

std::size_t Decoder::length(std::size_t min_element_size) {
    auto n = static_cast<std::size_t>(u32());
    if (min_element_size > 0 && n > remaining() / min_element_size) {
        throw DecodeError("length prefix exceeds remaining input");
    }
    return n;
}

Bytes Decoder::bytes() {
    auto n = length();
    Bytes out(n);
    raw(out);
    return out;
}

void Decoder::expect_done() const {
    if (!done()) {
        throw DecodeError("trailing bytes after value");
    }
}

std::string to_hex(ByteSpan data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw DecodeError("invalid hex digit");
    };
    if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    return out;
}

}  // namespace bftswap
