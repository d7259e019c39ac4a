// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/error.hpp"

namespace epg {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedTrace: return "MalformedTrace";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::WordOverflow: return "WordOverflow";
        case ErrorKind::InconsistentDepth: return "InconsistentDepth";
        case ErrorKind::TruncatedTrace: return "TruncatedTrace";
        case ErrorKind::ShadowDesync: return "ShadowDesync";
        case ErrorKind::DanglingSource: return "DanglingSource";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::PredicateError: return "PredicateError";
        case ErrorKind::NotDescendant: return "NotDescendant";
        case ErrorKind::SinkFailure: return "SinkFailure";
        case ErrorKind::BadThreshold: return "BadThreshold";
        case ErrorKind::UnknownKey: return "UnknownKey";
        case ErrorKind::MalformedConfig: return "MalformedConfig";
        case ErrorKind::MalformedPriceTable: return "MalformedPriceTable";
        case ErrorKind::ObserverFailure: return "ObserverFailure";
    }
    return "Unknown";
}

}  // namespace epg
