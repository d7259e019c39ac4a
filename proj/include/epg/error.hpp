// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epg {

enum class ErrorKind {
    MalformedTrace,
    SchemaViolation,
    WordOverflow,
    InconsistentDepth,
    TruncatedTrace,
    ShadowDesync,
    DanglingSource,
    UnknownLabel,
    PredicateError,
    NotDescendant,
    SinkFailure,
    BadThreshold,
    UnknownKey,
    MalformedConfig,
    MalformedPriceTable,
    ObserverFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string{to_string(kind)} + ": " + message), kind_{kind} {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace epg
