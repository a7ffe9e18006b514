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

#include "bftswap/types.hpp"

#include <charconv>

namespace bftswap {

std::string AccountId::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += "::";
        out += std::to_string(path[i]);
    }
    return out;
}

AccountId AccountId::parse(std::string_view text) {
    AccountId id;
    std::size_t pos = 0;
    while (true) {
        auto next = text.find("::", pos);
        auto part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            throw ConfigError("bad account id '" + std::string(text) + "'");
        }
        id.path.push_back(v);
        if (next == std::string_view::npos) break;
        pos = next + 2;
    }
    return id;
}

Digest credit_key(const Digest& certificate_value, std::uint32_t index, const AccountId& target) {
    Encoder e;
    e.raw(certificate_value);
    e.u32(index);
    encode(e, target);
    return sha256(e.data());
}

Digest CreditEffect::dedup_key() const { return credit_key(value_digest(certificate), index, target); }

}  // namespace bftswap
