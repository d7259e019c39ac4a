// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <sstream>

#include "epg/detectors.hpp"
#include "epg/error.hpp"

namespace epg {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

void PriceTable::add(const AssetKind& asset, std::uint64_t block, double usd) {
    if (!(usd > 0)) throw Error(ErrorKind::MalformedPriceTable, "prices must be strictly positive");
    prices_[asset][block] = usd;
}

std::optional<double> PriceTable::lookup(const AssetKind& asset, std::uint64_t block) const {
    auto it = prices_.find(asset);
    if (it == prices_.end()) return std::nullopt;
    auto at = it->second.upper_bound(block);
    if (at == it->second.begin()) return std::nullopt;
    return std::prev(at)->second;
}

PriceTable PriceTable::parse(std::string_view csv) {
    PriceTable t;
    std::istringstream is{std::string{csv}};
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::MalformedPriceTable, "line " + std::to_string(lineno) + ": " + why);
        };
        if (!header) {
            if (cells != std::vector<std::string>{"token", "block", "usd_price"})
                fail("expected header token,block,usd_price");
            header = true;
            continue;
        }
        if (cells.size() != 3) fail("expected three columns");
        AssetKind asset{true, {}};
        if (cells[0] != "ETH") {
            try {
                asset = AssetKind{false, parse_address(cells[0])};
            } catch (const Error& e) {
                fail(e.what());
            }
        }
        std::uint64_t block = 0;
        auto [p, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), block);
        if (ec != std::errc{} || p != cells[1].data() + cells[1].size()) fail("bad block number '" + cells[1] + "'");
        double price = 0;
        try {
            std::size_t used = 0;
            price = std::stod(cells[2], &used);
            if (used != cells[2].size()) fail("bad price '" + cells[2] + "'");
        } catch (const std::logic_error&) {
            fail("bad price '" + cells[2] + "'");
        }
        if (!(price > 0)) fail("prices must be strictly positive");
        t.add(asset, block, price);
    }
    if (!header) throw Error(ErrorKind::MalformedPriceTable, "empty price table");
    return t;
}

PriceTable PriceTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MalformedPriceTable, "cannot open price table '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace epg
