// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/trace.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "epg/error.hpp"
#include "epg/opcodes.hpp"

namespace epg {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        throw Error(ErrorKind::SchemaViolation, std::string{where} + " is missing required field '" + key + "'");
    return *it;
}

std::uint64_t as_u64(const json& v, const char* what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        auto i = v.get<std::int64_t>();
        if (i < 0) throw Error(ErrorKind::SchemaViolation, std::string{what} + " must be non-negative");
        return static_cast<std::uint64_t>(i);
    }
    if (v.is_string()) {
        auto w = parse_word(v.get<std::string>());
        if (w > std::numeric_limits<std::uint64_t>::max())
            throw Error(ErrorKind::SchemaViolation, std::string{what} + " does not fit 64 bits");
        return static_cast<std::uint64_t>(w);
    }
    throw Error(ErrorKind::SchemaViolation, std::string{what} + " must be an integer");
}

Word as_word(const json& v, const char* what) {
    if (v.is_string()) return parse_word(v.get<std::string>());
    if (v.is_number_unsigned() || v.is_number_integer()) return Word{as_u64(v, what)};
    throw Error(ErrorKind::SchemaViolation, std::string{what} + " must be a hex string");
}

Address as_address(const json& v, const char* what) {
    if (!v.is_string()) throw Error(ErrorKind::SchemaViolation, std::string{what} + " must be a hex address");
    return parse_address(v.get<std::string>());
}

OpStep parse_step(const json& j, std::size_t index) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, "structLogs[" + std::to_string(index) + "] is not an object");
    const std::string where = "structLogs[" + std::to_string(index) + "]";
    OpStep s;
    s.pc = as_u64(require(j, "pc", where.c_str()), "pc");
    const auto& op = require(j, "op", where.c_str());
    if (!op.is_string()) throw Error(ErrorKind::SchemaViolation, where + ".op must be a string");
    s.op = op.get<std::string>();
    s.code = opcode_from_name(s.op).value_or(op::INVALID);
    s.depth = static_cast<std::uint32_t>(as_u64(require(j, "depth", where.c_str()), "depth"));
    if (s.depth == 0) throw Error(ErrorKind::SchemaViolation, where + ".depth must be >= 1");
    if (auto it = j.find("gas"); it != j.end()) s.gas = as_u64(*it, "gas");
    if (auto it = j.find("gasCost"); it != j.end()) s.gas_cost = as_u64(*it, "gasCost");

    if (auto it = j.find("stack"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw Error(ErrorKind::SchemaViolation, where + ".stack must be an array");
        if (it->size() > 1024) throw Error(ErrorKind::SchemaViolation, where + ".stack exceeds 1024 entries");
        s.stack.reserve(it->size());
        for (const auto& w : *it) s.stack.push_back(as_word(w, "stack entry"));
    } else {
        throw Error(ErrorKind::SchemaViolation, where + " is missing required field 'stack'");
    }

    const auto& mem = require(j, "memory", where.c_str());
    if (!mem.is_array()) throw Error(ErrorKind::SchemaViolation, where + ".memory must be an array");
    s.memory.reserve(mem.size() * 32);
    for (const auto& w : mem) {
        if (!w.is_string()) throw Error(ErrorKind::SchemaViolation, where + ".memory entries must be strings");
        auto bytes = parse_bytes(w.get<std::string>());
        if (bytes.size() != 32) throw Error(ErrorKind::SchemaViolation, where + ".memory words must be 32 bytes");
        s.memory.insert(s.memory.end(), bytes.begin(), bytes.end());
    }

    if (auto it = j.find("storage"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw Error(ErrorKind::SchemaViolation, where + ".storage must be an object");
        for (const auto& [k, v] : it->items()) s.storage.emplace(parse_word(k), as_word(v, "storage value"));
    }
    return s;
}

Prestate parse_prestate(const json& j) {
    Prestate p;
    if (auto it = j.find("balances"); it != j.end())
        for (const auto& [k, v] : it->items()) p.balances.emplace(parse_address(k), as_word(v, "balance"));
    if (auto it = j.find("tokenBalances"); it != j.end())
        for (const auto& [token, holders] : it->items())
            for (const auto& [holder, v] : holders.items())
                p.token_balances[parse_address(token)].emplace(parse_address(holder), as_word(v, "token balance"));
    return p;
}

TransactionEnvelope parse_envelope(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, "'tx' must be an object");
    TransactionEnvelope e;
    if (auto it = j.find("hash"); it != j.end() && it->is_string()) e.tx_hash = it->get<std::string>();
    e.from = as_address(require(j, "from", "tx"), "tx.from");
    if (auto it = j.find("to"); it != j.end() && !it->is_null()) e.to = as_address(*it, "tx.to");
    if (auto it = j.find("contractAddress"); it != j.end() && !it->is_null())
        e.contract_address = as_address(*it, "tx.contractAddress");
    if (auto it = j.find("value"); it != j.end()) e.value = as_word(*it, "tx.value");
    if (auto it = j.find("input"); it != j.end() && it->is_string()) e.input = parse_bytes(it->get<std::string>());
    if (auto it = j.find("blockNumber"); it != j.end()) e.block_number = as_u64(*it, "tx.blockNumber");
    if (auto it = j.find("timestamp"); it != j.end()) e.timestamp = as_u64(*it, "tx.timestamp");
    if (auto it = j.find("gasUsed"); it != j.end()) e.gas_used = as_u64(*it, "tx.gasUsed");
    if (auto it = j.find("prestate"); it != j.end() && it->is_object()) e.prestate = parse_prestate(*it);
    return e;
}

ParsedTrace from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::SchemaViolation, "trace document must be an object");
    ParsedTrace t;
    t.envelope = parse_envelope(require(doc, "tx", "document"));
    const auto& trace = require(doc, "trace", "document");
    const auto& logs = require(trace, "structLogs", "trace");
    if (!logs.is_array()) throw Error(ErrorKind::SchemaViolation, "structLogs must be an array");
    t.steps.reserve(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) t.steps.push_back(parse_step(logs[i], i));
    return t;
}

}  // namespace

ParsedTrace parse_trace(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedTrace, e.what());
    }
    return from_json(doc);
}

ParsedTrace parse_trace(std::istream& in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

ParsedTrace load_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MalformedTrace, "cannot open trace file '" + path + "'");
    return parse_trace(in);
}

std::string serialize_trace(const ParsedTrace& trace, int indent) {
    using nlohmann::ordered_json;
    const auto& e = trace.envelope;
    ordered_json tx;
    tx["hash"] = e.tx_hash;
    tx["from"] = e.from.hex();
    tx["to"] = e.to ? ordered_json(e.to->hex()) : ordered_json(nullptr);
    if (e.contract_address) tx["contractAddress"] = e.contract_address->hex();
    tx["value"] = to_hex(e.value);
    tx["input"] = to_hex(ByteView{e.input});
    tx["blockNumber"] = e.block_number;
    tx["timestamp"] = e.timestamp;
    if (e.gas_used) tx["gasUsed"] = *e.gas_used;
    if (!e.prestate.balances.empty() || !e.prestate.token_balances.empty()) {
        ordered_json pre;
        ordered_json bal = ordered_json::object();
        for (const auto& [a, v] : e.prestate.balances) bal[a.hex()] = to_hex(v);
        pre["balances"] = bal;
        ordered_json tok = ordered_json::object();
        for (const auto& [t, holders] : e.prestate.token_balances) {
            ordered_json h = ordered_json::object();
            for (const auto& [a, v] : holders) h[a.hex()] = to_hex(v);
            tok[t.hex()] = h;
        }
        pre["tokenBalances"] = tok;
        tx["prestate"] = pre;
    }

    ordered_json logs = ordered_json::array();
    for (const auto& s : trace.steps) {
        ordered_json j;
        j["pc"] = s.pc;
        j["op"] = s.op;
        j["gas"] = s.gas;
        j["gasCost"] = s.gas_cost;
        j["depth"] = s.depth;
        ordered_json stack = ordered_json::array();
        for (const auto& w : s.stack) stack.push_back(to_hex(w));
        j["stack"] = stack;
        ordered_json mem = ordered_json::array();
        for (std::size_t off = 0; off + 32 <= s.memory.size(); off += 32)
            mem.push_back(to_hex(ByteView{s.memory}.subspan(off, 32), false));
        j["memory"] = mem;
        if (!s.storage.empty()) {
            ordered_json st = ordered_json::object();
            for (const auto& [k, v] : s.storage) st[to_hex64(k)] = to_hex64(v);
            j["storage"] = st;
        }
        logs.push_back(std::move(j));
    }
    ordered_json doc;
    doc["tx"] = tx;
    doc["trace"] = ordered_json{{"structLogs", logs}};
    return doc.dump(indent);
}

}  // namespace epg
