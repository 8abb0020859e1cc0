// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mgcps {

/// Base of every error raised by the engine. Each module derives a typed
/// error carrying a kind enum so callers can branch without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename KindT>
class KindedError : public Error {
public:
    using Kind = KindT;

    KindedError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace mgcps
