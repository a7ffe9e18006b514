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

#include "bftswap/assets.hpp"

#include <set>

namespace bftswap {
namespace {

std::optional<std::uint64_t> read_amount(const Bytes& x) {
    if (x.size() != 8) return std::nullopt;
    Decoder d(x);
    return d.u64();
}

Bytes amount_bytes(std::uint64_t v) {
    Encoder e;
    e.u64(v);
    return e.take();
}

std::optional<std::uint32_t> read_u32_param(const Bytes& p) {
    if (p.size() != 4) return std::nullopt;
    Decoder d(p);
    return d.u32();
}

}  // namespace

void ExecutionRegistry::add(ExecutionFunction fn) {
    auto name = fn.name;
    functions_.insert_or_assign(std::move(name), std::move(fn));
}

const ExecutionFunction* ExecutionRegistry::find(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

std::vector<std::string> ExecutionRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : functions_) out.push_back(name);
    return out;
}

ExecutionRegistry ExecutionRegistry::builtin() {
    ExecutionRegistry r;
    // Moves every payload to a fresh id unchanged.
    r.add({"identity", [](const Bytes& params, const std::vector<Bytes>& in) -> std::optional<std::vector<Bytes>> {
               if (!params.empty() || in.empty()) return std::nullopt;
               return in;
           }});
    // One 8-byte amount into `parts` near-equal amounts; the first outputs
    // absorb the remainder.
    r.add({"split", [](const Bytes& params, const std::vector<Bytes>& in) -> std::optional<std::vector<Bytes>> {
               auto parts = read_u32_param(params);
               if (!parts || *parts == 0 || in.size() != 1) return std::nullopt;
               auto total = read_amount(in[0]);
               if (!total || *total < *parts) return std::nullopt;
               std::vector<Bytes> out;
               for (std::uint32_t t = 0; t < *parts; ++t) {
                   out.push_back(amount_bytes(*total / *parts + (t < *total % *parts ? 1 : 0)));
               }
               return out;
           }});
    // Several 8-byte amounts into their sum.
    r.add({"merge", [](const Bytes& params, const std::vector<Bytes>& in) -> std::optional<std::vector<Bytes>> {
               if (!params.empty() || in.empty()) return std::nullopt;
               std::uint64_t sum = 0;
               for (const auto& x : in) {
                   auto v = read_amount(x);
                   if (!v || sum + *v < sum) return std::nullopt;
                   sum += *v;
               }
               return std::vector<Bytes>{amount_bytes(sum)};
           }});
    // Payloads joined in input order, with the parameters as separator.
    r.add({"concat", [](const Bytes& params, const std::vector<Bytes>& in) -> std::optional<std::vector<Bytes>> {
               if (in.size() < 2) return std::nullopt;
               Bytes out;
               for (std::size_t i = 0; i < in.size(); ++i) {
                   if (i) out.insert(out.end(), params.begin(), params.end());
                   out.insert(out.end(), in[i].begin(), in[i].end());
               }
               return std::vector<Bytes>{out};
           }});
    return r;
}

Digest transmute_commitment(const TransmuteRequest& req) {
    TransmuteCommitment c{req.function, req.params, {}, req.output_owners};
    for (const auto& a : req.inputs) c.inputs.push_back(a.value_digest());
    return digest_of(c);
}

namespace {

std::optional<std::vector<Bytes>> evaluate(const ExecutionRegistry& registry, const TransmuteRequest& req) {
    const auto* fn = registry.find(req.function);
    if (!fn) return std::nullopt;
    std::vector<Bytes> xs;
    for (const auto& a : req.inputs) xs.push_back(a.value.data);
    return fn->eval(req.params, xs);
}

}  // namespace

Status check_transmute(const Committee& committee, const ExecutionRegistry& registry, const TransmuteRequest& req) {
    if (!registry.find(req.function)) return Error::UnknownExecutionFunction;
    if (req.inputs.empty()) return Error::UndefinedExecution;
    std::set<AccountId> ids;
    for (const auto& a : req.inputs) {
        if (!verify_asset(committee, a)) return Error::BadAsset;
        if (!ids.insert(a.value.id).second) return Error::BadAsset;
    }
    auto out = evaluate(registry, req);
    if (!out || out->size() != req.output_owners.size()) return Error::UndefinedExecution;
    return {};
}

Result<std::vector<AssetBinding>> transmute_outputs(const Committee& committee, const ExecutionRegistry& registry,
                                                    const TransmuteRequest& req,
                                                    const std::vector<RequestCertificate>& spends) {
    if (auto s = check_transmute(committee, registry, req); !s) return s.error();
    if (spends.size() != req.inputs.size()) return Error::InputInactive;
    const Digest commitment = transmute_commitment(req);
    for (std::size_t i = 0; i < spends.size(); ++i) {
        const Request& r = spends[i].value;
        const auto* spend = std::get_if<Spend>(&r.operation);
        if (!spend || r.kind != RequestKind::Execute || r.id != req.inputs[i].value.id) return Error::InputInactive;
        if (!check_certificate(committee, spends[i])) return Error::BadCertificate;
        if (spend->commitment != commitment) return Error::CommitmentMismatch;
    }
    auto xs = evaluate(registry, req);
    if (!xs || xs->size() != req.output_owners.size()) return Error::UndefinedExecution;

    const AccountId base = spends[0].value.id.child(spends[0].value.sequence);
    std::vector<AssetBinding> out;
    for (std::size_t t = 0; t < xs->size(); ++t) {
        out.push_back(AssetBinding{base.child(t), (*xs)[t]});
    }
    return out;
}

bool verify_asset(const Committee& committee, const Asset& asset) {
    return asset.value.id.valid() && check_certificate(committee, asset);
}

}  // namespace bftswap
