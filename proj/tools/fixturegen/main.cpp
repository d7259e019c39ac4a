// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

// Regenerates the trace corpus under tests/fixtures from the scenario code.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"
#include "epg/frames.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic trace fixtures"};
    std::string out_dir = "tests/fixtures";
    app.add_option("-o,--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out_dir);
    auto all = fixturegen::reentrancy_fixtures();
    for (auto& f : fixturegen::defi_fixtures()) all.push_back(std::move(f));
    for (const auto& f : all) {
        const auto path = std::filesystem::path(out_dir) / (f.name + ".json");
        std::ofstream os(path);
        os << epg::serialize_trace(f.trace) << '\n';
        const auto frames = epg::reconstruct_frames(f.trace.envelope, f.trace.steps);
        std::cout << f.name << ": " << f.trace.steps.size() << " steps, " << frames.size() << " frames\n";
    }
    return 0;
}
