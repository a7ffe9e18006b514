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
 * @file assets.hpp
 *
 * Off-chain certified assets and spend-and-create transmutation.
 *
 * An asset is a certificate over (id, x); authorities never store x. A
 * transmutation spends ell input accounts, each Spend committing to the
 * digest of the same parameters, and authorities then certify the d output
 * bindings computed by a registered deterministic partial function. Output
 * bindings are a pure function of the spend certificates, so replaying the
 * exchange yields byte-identical outputs.
 */
#pragma once

#include "bftswap/committee.hpp"
#include "bftswap/result.hpp"
#include "bftswap/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bftswap {

// f_exec(P, x_1..x_ell) -> (x'_1..x'_d), or nullopt outside its domain.
using ExecutionFn = std::function<std::optional<std::vector<Bytes>>(const Bytes& params, const std::vector<Bytes>& inputs)>;

struct ExecutionFunction {
    std::string name;
    ExecutionFn eval;
};

class ExecutionRegistry {
public:
    void add(ExecutionFunction fn);
    const ExecutionFunction* find(const std::string& name) const;
    std::vector<std::string> names() const;

    // identity, split, merge and concat.
    static ExecutionRegistry builtin();

private:
    std::map<std::string, ExecutionFunction> functions_;
};

struct TransmuteRequest {
    std::string function;
    Bytes params;
    std::vector<Asset> inputs;
    std::vector<PublicKey> output_owners;  // one per output

    BFTSWAP_FIELDS(function, params, inputs, output_owners)
    bool operator==(const TransmuteRequest&) const = default;
};

// The committed parameters P: everything except the input signatures.
struct TransmuteCommitment {
    std::string function;
    Bytes params;
    std::vector<Digest> inputs;
    std::vector<PublicKey> output_owners;

    BFTSWAP_FIELDS(function, params, inputs, output_owners)
};

Digest transmute_commitment(const TransmuteRequest& req);

// Checks everything an authority can check before voting on a spend of
// input `index`: registered function, valid input assets with distinct ids,
// defined result with one owner per output.
Status check_transmute(const Committee& committee, const ExecutionRegistry& registry, const TransmuteRequest& req);

// Evaluates f_exec and derives output ids from the spend certificates:
// first input id :: its spend sequence :: output index.
Result<std::vector<AssetBinding>> transmute_outputs(const Committee& committee, const ExecutionRegistry& registry,
                                                    const TransmuteRequest& req,
                                                    const std::vector<RequestCertificate>& spends);

bool verify_asset(const Committee& committee, const Asset& asset);

}  // namespace bftswap
