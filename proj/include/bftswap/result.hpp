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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace bftswap {

// Protocol-level rejections. These are expected outcomes of handling
// untrusted input and travel back to clients inside ErrorReply, so the
// numeric values are part of the wire format.
enum class Error : std::uint8_t {
    // committee
    QuorumNotReached = 1,
    BadSignature = 2,
    BadCertificate = 3,
    // accounts
    AlreadyExists = 10,
    InsufficientFunds = 11,
    BadDerivedId = 12,
    SameAccountSwap = 13,
    BadValue = 14,
    InactiveAccount = 15,
    BadAuth = 16,
    SequenceMismatch = 17,
    AccountBusy = 18,
    LockNotAllowed = 19,
    UnknownAccount = 20,
    BadRole = 21,
    // swap consensus
    UnknownInstance = 30,
    BadLockCert = 31,
    NotALockedOwner = 32,
    InvalidConfirm = 33,
    RoundUnavailable = 34,
    Unsafe = 35,
    NotRoundLeader = 36,
    MissingLockCertificate = 37,
    // client
    Stalled = 40,
    ConflictObserved = 41,
    // assets
    UndefinedExecution = 50,
    CommitmentMismatch = 51,
    InputInactive = 52,
    UnknownExecutionFunction = 53,
    BadAsset = 54,
    // state algebra
    UnsafeRemote = 60,
    InvalidLocalResult = 61,
    RateExceeded = 62,
    // threshold encryption and auctions
    BadThreshold = 70,
    MessageOutOfRange = 71,
    WrongPhase = 72,
    BadEvidence = 73,
    NotSeller = 74,
    BadBidCert = 75,
    DecryptionMismatch = 76,
    UnknownAuction = 77,
    // harness
    ConfigError = 90,
    BudgetExceeded = 91,
    BoundsTooLarge = 92,
};

std::string_view to_string(Error error);

// Value-or-error for protocol handlers. Kept deliberately small: GCC 11
// has no std::expected.
template <typename T>
class [[nodiscard]] Result {
public:
    Result(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
    Result(Error error) : state_(error) {}         // NOLINT(google-explicit-constructor)

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    Error error() const { return std::get<Error>(state_); }

    const T& value() const& { return checked(); }
    T& value() & { return const_cast<T&>(checked()); }
    T&& value() && { return std::move(const_cast<T&>(checked())); }

    const T& operator*() const& { return value(); }
    T& operator*() & { return value(); }
    const T* operator->() const { return &value(); }
    T* operator->() { return &value(); }

private:
    const T& checked() const {
        if (!ok()) {
            throw std::logic_error("Result::value() on error: " + std::string(to_string(error())));
        }
        return std::get<T>(state_);
    }

    std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
public:
    Result() = default;
    Result(Error error) : error_(error), failed_(true) {}  // NOLINT(google-explicit-constructor)

    bool ok() const { return !failed_; }
    explicit operator bool() const { return ok(); }
    Error error() const { return error_; }

private:
    Error error_ = Error::QuorumNotReached;
    bool failed_ = false;
};

using Status = Result<void>;

// Raised for malformed bytes and invalid configuration; these are not
// protocol outcomes and are not sent over the wire.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bftswap
