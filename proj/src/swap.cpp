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

#include "bftswap/swap.hpp"

#include <limits>

namespace bftswap {

Time round_release_offset(RoundNumber k, const SwapParams& params) {
    constexpr Time kNever = std::numeric_limits<Time>::max();
    const Time interval = params.round_interval;
    if (k <= params.escalation_round) return k * interval;
    const RoundNumber j = k - params.escalation_round;
    if (j >= 40) return kNever;
    const Time extra = interval * ((Time{1} << j) - 1);
    return params.escalation_round * interval + extra;
}

bool is_round_available(RoundNumber k, Time elapsed, const SwapParams& params) {
    return round_release_offset(k, params) <= elapsed;
}

SafetyRules SafetyRules::without(char rule) {
    SafetyRules r;
    switch (rule) {
        case 'a': r.a = false; break;
        case 'b': r.b = false; break;
        case 'c': r.c = false; break;
        case 'd': r.d = false; break;
        default: break;
    }
    return r;
}

bool is_safe_proposal(const std::optional<Proposal>& proposed, const std::optional<Proposal>& locked,
                      const Proposal& p, const SafetyRules& rules) {
    if (rules.a && proposed && p != *proposed && p.round <= proposed->round) return false;
    if (rules.b && locked && (p.round <= locked->round || p.decision != locked->decision)) return false;
    return true;
}

bool is_safe_pre_commit(const std::optional<Proposal>& proposed, const std::optional<Proposal>& locked,
                        const Proposal& c, const SafetyRules& rules) {
    if (rules.c && proposed && c.round < proposed->round) return false;
    if (rules.d && locked && c.round < locked->round) return false;
    return true;
}

std::optional<LockInfo> read_lock_certificate(const Committee& committee, const RequestCertificate& cert,
                                              const AccountId& swid, std::uint8_t role) {
    const Request& r = cert.value;
    if (r.kind != RequestKind::Lock) return std::nullopt;
    const auto* lock = std::get_if<LockInto>(&r.operation);
    if (!lock || lock->swid != swid || lock->role != role) return std::nullopt;
    if (!check_certificate(committee, cert)) return std::nullopt;
    return LockInfo{r.id, r.sequence, lock->key};
}

SwapInstance init_instance(const InitInstanceEffect& effect, Time now) {
    SwapInstance inst;
    inst.swid = effect.swid;
    inst.ids = {effect.id1, effect.id2};
    inst.sequences = {effect.n1, effect.n2};
    inst.received = effect.certificate;
    inst.created_at = now;
    return inst;
}

Status handle_proposal(SwapInstance& inst, const SwapContext& ctx, const AuthenticatedProposal& auth,
                       const std::optional<RequestCertificate>& l1, const std::optional<RequestCertificate>& l2) {
    if (!auth.verify()) return Error::BadAuth;
    const Proposal& p = auth.value;
    if (p.swid != inst.swid) return Error::UnknownInstance;

    const std::array<const std::optional<RequestCertificate>*, 2> supplied{&l1, &l2};
    for (std::size_t i = 0; i < 2; ++i) {
        if (!*supplied[i]) continue;
        auto info = read_lock_certificate(ctx.committee, **supplied[i], inst.swid, static_cast<std::uint8_t>(i + 1));
        if (!info || info->id != inst.ids[i] || info->sequence != inst.sequences[i]) return Error::BadLockCert;
        inst.keys[i] = info->key;
    }

    if (auth.key != inst.keys[0] && auth.key != inst.keys[1]) return Error::NotALockedOwner;
    if (p.decision == Decision::Confirm && (!inst.keys[0] || !inst.keys[1])) return Error::InvalidConfirm;
    if (!is_round_available(p.round, ctx.now - std::min(ctx.now, inst.created_at), ctx.params)) {
        return Error::RoundUnavailable;
    }
    if (ctx.params.parity_leader && p.round > ctx.params.escalation_round) {
        const auto& leader = inst.keys[p.round % 2 == 0 ? 0 : 1];
        if (auth.key != leader) return Error::NotRoundLeader;
    }
    if (inst.proposed && *inst.proposed == p) return {};
    if (!is_safe_proposal(inst.proposed, inst.locked_proposal(), p, ctx.rules)) return Error::Unsafe;
    inst.proposed = p;
    return {};
}

Status handle_pre_commit(SwapInstance& inst, const SwapContext& ctx, const PreCommitCertificate& cert) {
    if (!check_certificate(ctx.committee, cert)) return Error::BadCertificate;
    const Proposal& p = cert.value.proposal;
    if (p.swid != inst.swid) return Error::UnknownInstance;
    if (inst.locked && inst.locked->value == cert.value) return {};
    if (!is_safe_pre_commit(inst.proposed, inst.locked_proposal(), p, ctx.rules)) return Error::Unsafe;
    inst.locked = cert;
    return {};
}

Result<std::vector<UnlockEffect>> commit_effects(const SwapInstance* inst, const Committee& committee,
                                                 const CommitCertificate& cert,
                                                 const std::optional<RequestCertificate>& l1,
                                                 const std::optional<RequestCertificate>& l2) {
    if (!check_certificate(committee, cert)) return Error::BadCertificate;
    const Proposal& p = cert.value.proposal;
    const std::array<const std::optional<RequestCertificate>*, 2> supplied{&l1, &l2};

    std::array<std::optional<LockInfo>, 2> locals;
    if (inst) {
        if (inst->swid != p.swid) return Error::UnknownInstance;
        for (std::size_t i = 0; i < 2; ++i) {
            if (inst->keys[i]) locals[i] = LockInfo{inst->ids[i], inst->sequences[i], *inst->keys[i]};
        }
    }

    std::vector<UnlockEffect> effects;
    if (p.decision == Decision::Confirm && inst) {
        // A Confirm certificate proves both locks exist; fill in any lock
        // this authority has not seen yet from the attached certificates.
        for (std::size_t i = 0; i < 2; ++i) {
            if (locals[i]) continue;
            if (!*supplied[i]) return Error::MissingLockCertificate;
            auto info = read_lock_certificate(committee, **supplied[i], p.swid, static_cast<std::uint8_t>(i + 1));
            if (!info || info->id != inst->ids[i] || info->sequence != inst->sequences[i]) return Error::BadLockCert;
            locals[i] = info;
        }
        for (std::size_t i = 0; i < 2; ++i) {
            effects.push_back(UnlockEffect{locals[i]->id, locals[i]->sequence, locals[1 - i]->key, cert});
        }
        return effects;
    }

    if (p.decision == Decision::Abort) {
        for (std::size_t i = 0; i < 2; ++i) {
            if (!*supplied[i]) continue;
            auto info = read_lock_certificate(committee, **supplied[i], p.swid, static_cast<std::uint8_t>(i + 1));
            if (!info) return Error::BadLockCert;
            locals[i] = info;
        }
    }
    for (std::size_t i = 0; i < 2; ++i) {
        if (locals[i]) effects.push_back(UnlockEffect{locals[i]->id, locals[i]->sequence, std::nullopt, cert});
    }
    return effects;
}

}  // namespace bftswap
